#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "kerrcav/errors.hpp"
#include "kerrcav/model.hpp"

namespace kerrcav {

/// Independent check on rabi_amplitudes: integrates the Schrodinger equation
/// of the {|n,+>, |n+1,->} block with fixed-step classical RK4.
///
/// The block Hamiltonian is built directly from its matrix elements. Its
/// scalar part (mean of the two diagonal energies) only contributes the
/// exact phase exp(-i c t) and is applied analytically; the traceless rest is
/// stepped. For a constant linear system one RK4 step is the fixed matrix
/// I + A + A^2/2 + A^3/6 + A^4/24 with A = -i K h, so `steps` steps are
/// evaluated as that matrix raised to the `steps`-th power by repeated
/// squaring. Arithmetic is carried in long double.
///
/// Throws NumericalError if the final norm drifts from 1 by more than 1e-8.
inline RabiAmplitudes numeric_evolution_oracle(int n, double t, const ModelParams& p, std::uint64_t steps) {
    using real = long double;
    using lc = std::complex<real>;
    using mat = std::array<lc, 4>;  // row-major 2x2

    if (steps == 0) throw std::invalid_argument("oracle needs at least one step");
    if (t == 0.0) return {cplx{1.0, 0.0}, cplx{0.0, 0.0}};

    const real chi = p.kerr();
    const real delta = p.detuning();
    auto kerr = [chi](int k) { return chi * (static_cast<real>(k) * k - k); };
    const real h00 = delta / 2 + kerr(n);
    const real h11 = -delta / 2 + kerr(n + 1);
    const real h01 = static_cast<real>(p.coupling) * std::sqrt(static_cast<real>(n) + 1);
    const real centre = (h00 + h11) / 2;
    const real k00 = h00 - centre;
    const real k11 = h11 - centre;

    auto mul = [](const mat& x, const mat& y) {
        return mat{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
                   x[2] * y[1] + x[3] * y[3]};
    };

    const real h = static_cast<real>(t) / static_cast<real>(steps);
    const lc mi{0, -1};
    const mat a{mi * k00 * h, mi * h01 * h, mi * h01 * h, mi * k11 * h};
    const mat a2 = mul(a, a);
    const mat a3 = mul(a2, a);
    const mat a4 = mul(a3, a);
    mat step{};
    const mat id{lc{1}, lc{0}, lc{0}, lc{1}};
    for (int i = 0; i < 4; ++i) step[i] = id[i] + a[i] + a2[i] / real(2) + a3[i] / real(6) + a4[i] / real(24);

    mat result = id;
    mat base = step;
    for (std::uint64_t e = steps; e > 0; e >>= 1) {
        if (e & 1U) result = mul(result, base);
        if (e > 1) base = mul(base, base);
    }

    const lc phase = std::polar(real(1), -centre * static_cast<real>(t));
    const lc upper = phase * result[0];
    const lc lower = phase * result[2];
    const real norm = std::norm(upper) + std::norm(lower);
    if (std::fabs(norm - 1) > 1e-8L)
        throw NumericalError("RK4 oracle norm drift " + std::to_string(static_cast<double>(norm - 1)) +
                             "; step size too coarse");
    return {cplx(static_cast<double>(upper.real()), static_cast<double>(upper.imag())),
            cplx(static_cast<double>(lower.real()), static_cast<double>(lower.imag()))};
}

/// Doubles the RK4 step count until halving the step moves either amplitude
/// by less than `tolerance`.
inline RabiAmplitudes converged_evolution_oracle(int n, double t, const ModelParams& p, double tolerance = 1e-10) {
    if (t == 0.0) return {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
    const double chi = p.kerr();
    const double spread = std::fabs(p.detuning() / 2 - chi * n) + p.coupling * std::sqrt(n + 1.0);
    // Start from roughly 0.01 rad of traceless phase per step, where the RK4
    // norm loss per step is about 1e-14.
    std::uint64_t steps = 16;
    while (static_cast<double>(steps) < spread * std::fabs(t) / 0.01) steps <<= 1;

    RabiAmplitudes previous = numeric_evolution_oracle(n, t, p, steps);
    for (int doubling = 0; doubling < 24; ++doubling) {
        steps <<= 1;
        const RabiAmplitudes next = numeric_evolution_oracle(n, t, p, steps);
        const double change = std::max(std::abs(next.upper - previous.upper), std::abs(next.lower - previous.lower));
        if (change < tolerance) return next;
        previous = next;
    }
    throw NumericalError("RK4 oracle did not converge for n=" + std::to_string(n) + ", t=" + std::to_string(t));
}

}  // namespace kerrcav
