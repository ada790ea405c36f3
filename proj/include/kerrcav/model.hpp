#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kerrcav {

using cplx = std::complex<double>;

/// Physical configuration of the atom + Kerr-cavity system.
///
/// Frequencies are measured in units of the coupling, so with the default
/// coupling of 1 the time argument everywhere is the Rabi angle.
struct ModelParams {
    double coupling = 1.0;          ///< atom-field coupling, > 0
    double kerr_ratio = 0.0;        ///< Kerr strength over coupling, >= 0
    double detuning_ratio = 0.0;    ///< atom-cavity detuning over coupling
    double mean_photons = 10.0;     ///< mean photon number of the coherent field
    double coherent_phase = 0.0;    ///< phase of the coherent amplitude, radians
    std::optional<int> fock_cutoff; ///< highest Fock index summed; auto if empty
    double truncation_epsilon = 1e-12;

    double kerr() const { return kerr_ratio * coupling; }
    double detuning() const { return detuning_ratio * coupling; }
};

/// Throws std::invalid_argument naming the first violated constraint.
inline void validate(const ModelParams& p) {
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (!(p.coupling > 0.0) || !std::isfinite(p.coupling)) fail("coupling must be finite and > 0");
    if (!(p.kerr_ratio >= 0.0) || !std::isfinite(p.kerr_ratio)) fail("kerr_ratio must be finite and >= 0");
    if (!std::isfinite(p.detuning_ratio)) fail("detuning_ratio must be finite");
    if (!(p.mean_photons >= 0.0) || !std::isfinite(p.mean_photons)) fail("mean_photons must be finite and >= 0");
    if (!std::isfinite(p.coherent_phase)) fail("coherent_phase must be finite");
    if (p.fock_cutoff && *p.fock_cutoff < 0) fail("fock_cutoff must be >= 0");
    if (!(p.truncation_epsilon > 0.0 && p.truncation_epsilon < 1.0))
        fail("truncation_epsilon must lie in (0, 1)");
}

namespace detail {

// lgamma is not guaranteed thread-safe (it may write signgam), and sweeps
// evaluate these from worker threads.
inline const std::vector<double>& log_factorial_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(4096);
        long double acc = 0.0L;
        t[0] = 0.0;
        for (std::size_t k = 1; k < t.size(); ++k) {
            acc += std::log(static_cast<long double>(k));
            t[k] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

}  // namespace detail

inline double log_factorial(int n) {
    const auto& table = detail::log_factorial_table();
    if (n < 0) throw std::invalid_argument("log_factorial of a negative integer");
    if (static_cast<std::size_t>(n) < table.size()) return table[static_cast<std::size_t>(n)];
    // Stirling series; far beyond any truncation used in practice.
    const double x = n + 1.0;
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + 1.0 / (12.0 * x) -
           1.0 / (360.0 * x * x * x);
}

/// log of the Poisson mass e^{-nbar} nbar^n / n!; -inf when the mass is zero.
inline double log_poisson_weight(int n, double nbar) {
    if (n < 0) return -std::numeric_limits<double>::infinity();
    if (nbar == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -nbar + n * std::log(nbar) - log_factorial(n);
}

/// Photon-number distribution of a coherent state with mean nbar.
inline double poisson_weight(int n, double nbar) { return std::exp(log_poisson_weight(n, nbar)); }

/// Fock amplitude <n|alpha0> of the coherent state alpha0 = sqrt(nbar) e^{i phase}.
inline cplx coherent_coefficient(int n, double nbar, double phase) {
    if (n < 0) return {0.0, 0.0};
    const double magnitude = std::exp(0.5 * log_poisson_weight(n, nbar));
    return std::polar(magnitude, n * phase);
}

/// Smallest N with cumulative Poisson mass over [0, N] >= 1 - eps, plus two
/// so that every Fock index referenced by the two-atom blocks is covered.
inline int auto_truncation(double nbar, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("truncation epsilon must lie in (0, 1)");
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw std::invalid_argument("mean photon number must be >= 0");
    double cumulative = 0.0;
    for (int n = 0;; ++n) {
        cumulative += poisson_weight(n, nbar);
        if (cumulative >= 1.0 - eps) return n + 2;
        if (n > 1000000) throw std::invalid_argument("mean photon number too large for truncation");
    }
}

inline int resolved_truncation(const ModelParams& p) {
    return p.fock_cutoff ? *p.fock_cutoff : auto_truncation(p.mean_photons, p.truncation_epsilon);
}

/// Kerr energy chi (n^2 - n) of the n-photon state.
inline double kerr_energy(double chi, int n) { return chi * (static_cast<double>(n) * n - n); }

/// Diagonal energies and eigenfrequencies of the {|n,+>, |n+1,->} block.
struct DressedAngles {
    double alpha;  ///< energy of |n,+>
    double gamma;  ///< energy of |n+1,->
    double mu1;
    double mu2;
    double f1;  ///< weight of the mu1 exponential in the upper amplitude
    double f2;

    // Stable forms of mu_j + alpha; the naive subtraction cancels badly when
    // the Kerr shift dominates the coupling.
    double mu1_plus_alpha;
    double mu2_plus_alpha;
    double half_splitting;  ///< (mu1 - mu2) / 2
};

inline DressedAngles dressed_angles(int n, const ModelParams& p) {
    const double chi = p.kerr();
    const double delta = p.detuning();
    DressedAngles d{};
    d.alpha = 0.5 * delta + chi * n * (n - 1.0);
    d.gamma = -0.5 * delta + chi * n * (n + 1.0);

    const double a = 0.5 * (d.alpha - d.gamma);
    const double g2 = p.coupling * p.coupling * (n + 1.0);
    const double r = std::sqrt(a * a + g2);
    d.half_splitting = r;
    d.mu1 = -0.5 * (d.alpha + d.gamma) + r;
    d.mu2 = -0.5 * (d.alpha + d.gamma) - r;

    // mu1 + alpha = a + r, mu2 + alpha = a - r, and (r + a)(r - a) = g^2.
    if (a >= 0.0) {
        d.mu1_plus_alpha = a + r;
        d.mu2_plus_alpha = -g2 / (r + a);
    } else {
        d.mu1_plus_alpha = g2 / (r - a);
        d.mu2_plus_alpha = a - r;
    }
    // F_j = (mu_k + alpha) / (mu_k - mu_j), k != j.
    d.f1 = d.mu2_plus_alpha / (-2.0 * r);
    d.f2 = d.mu1_plus_alpha / (2.0 * r);
    return d;
}

/// Amplitudes of |n,+> and |n+1,-> at time t starting from |n,+>.
struct RabiAmplitudes {
    cplx upper;  ///< Gamma_1(n, t)
    cplx lower;  ///< Gamma_2(n + 1, t)
};

inline RabiAmplitudes rabi_amplitudes(int n, double t, const ModelParams& p) {
    if (t == 0.0) return {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
    const DressedAngles d = dressed_angles(n, p);
    // e^{i mu_j t} = e^{-i (alpha + gamma) t / 2} e^{+-i r t}; the common phase
    // is factored out so the relative phase keeps full precision at large t.
    const cplx common = std::polar(1.0, -0.5 * (d.alpha + d.gamma) * t);
    const cplx plus = std::polar(1.0, d.half_splitting * t);
    const cplx minus = std::conj(plus);
    const double g = p.coupling * std::sqrt(n + 1.0);

    RabiAmplitudes out;
    out.upper = common * (d.f1 * plus + d.f2 * minus);
    out.lower = -common * (d.f1 * d.mu1_plus_alpha * plus + d.f2 * d.mu2_plus_alpha * minus) / g;
    return out;
}

/// Per-Fock-index one-atom amplitudes at a fixed time, for n = 0..cutoff+2.
///
/// Immutable after construction; share freely between threads.
class RabiTable {
public:
    struct Record {
        DressedAngles angles;
        RabiAmplitudes amplitudes;
    };

    RabiTable(const ModelParams& params, double t) : RabiTable(params, t, resolved_truncation(params)) {}

    RabiTable(const ModelParams& params, double t, int cutoff) : t_(t), cutoff_(cutoff) {
        if (cutoff < 0) throw std::invalid_argument("Fock cutoff must be >= 0");
        records_.reserve(static_cast<std::size_t>(cutoff) + 3);
        for (int n = 0; n <= cutoff + 2; ++n) records_.push_back({dressed_angles(n, params), rabi_amplitudes(n, t, params)});
    }

    double time() const { return t_; }
    int cutoff() const { return cutoff_; }
    int max_index() const { return cutoff_ + 2; }
    const std::vector<Record>& records() const { return records_; }

    /// Gamma_1(n, t).
    cplx gamma1(int n) const { return at(n).amplitudes.upper; }

    /// Gamma_2(k, t), the amplitude of |k,-> grown from |k-1,+>; zero for k = 0.
    cplx gamma2(int k) const {
        if (k == 0) return {0.0, 0.0};
        return at(k - 1).amplitudes.lower;
    }

private:
    const Record& at(int n) const {
        if (n < 0 || n > max_index()) throw std::out_of_range("Rabi table index " + std::to_string(n));
        return records_[static_cast<std::size_t>(n)];
    }

    double t_;
    int cutoff_;
    std::vector<Record> records_;
};

}  // namespace kerrcav
