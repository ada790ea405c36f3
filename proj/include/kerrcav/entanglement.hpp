#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <string_view>

#include "kerrcav/errors.hpp"
#include "kerrcav/joint_state.hpp"

namespace kerrcav {

// All functions taking a bare Eigen::Matrix4cd expect the canonical
// {++, +-, -+, --} ordering; TwoQubitDensity overloads convert first.

/// Wootters spin flip (sigma_y x sigma_y) rho* (sigma_y x sigma_y).
///
/// sigma_y x sigma_y is real and anti-diagonal with signs (-1, +1, +1, -1),
/// so the flip reverses both indices of rho* and negates the entries that
/// connect {++, --} with {+-, -+}.
inline Eigen::Matrix4cd spin_flip(const Eigen::Matrix4cd& rho) {
    static constexpr std::array<double, 4> sign{-1.0, 1.0, 1.0, -1.0};
    Eigen::Matrix4cd out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = sign[i] * sign[j] * std::conj(rho(3 - i, 3 - j));
    return out;
}

inline Eigen::Matrix4cd spin_flip(const TwoQubitDensity& rho) { return spin_flip(rho.canonical()); }

/// T = rho * spin_flip(rho).
inline Eigen::Matrix4cd t_matrix(const Eigen::Matrix4cd& rho) { return rho * spin_flip(rho); }

using Spectrum = std::array<double, 4>;  // descending

namespace detail {

inline constexpr double kNegativeClip = 1e-9;
inline constexpr double kImagResidue = 1e-6;

/// Hermitian square root after checking rho is Hermitian and PSD.
inline Eigen::Matrix4cd checked_sqrt(const Eigen::Matrix4cd& rho) {
    const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw InvalidDensityError("density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(rho);
    Eigen::Vector4d w = eig.eigenvalues();
    for (int k = 0; k < 4; ++k) {
        if (w(k) < -kNegativeClip)
            throw InvalidDensityError("density matrix has eigenvalue " + std::to_string(w(k)));
        w(k) = std::sqrt(std::max(0.0, w(k)));
    }
    return eig.eigenvectors() * w.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace detail

/// Descending square roots of the eigenvalues of rho * spin_flip(rho).
///
/// These are the singular values of sqrt(rho) * spin_flip(sqrt(rho)), which
/// keeps small eigenvalues at absolute rather than square-root accuracy. The
/// non-Hermitian T is also diagonalised directly as a validity check.
inline Spectrum sqrt_t_eigenvalues(const Eigen::Matrix4cd& rho) {
    const Eigen::Matrix4cd root = detail::checked_sqrt(rho);

    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> general(t_matrix(rho), false);
    for (int k = 0; k < 4; ++k) {
        const cplx e = general.eigenvalues()(k);
        if (std::fabs(e.imag()) > detail::kImagResidue)
            throw InvalidDensityError("T eigenvalue has imaginary residue " + std::to_string(e.imag()));
        if (e.real() < -detail::kNegativeClip)
            throw InvalidDensityError("T eigenvalue " + std::to_string(e.real()) + " is negative");
    }

    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(root * spin_flip(root));
    Spectrum s{};
    for (int k = 0; k < 4; ++k) s[static_cast<std::size_t>(k)] = svd.singularValues()(k);
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

/// Eigenvalues E1 >= E2 >= E3 >= E4 >= 0 of T = rho * spin_flip(rho).
inline Spectrum t_eigenvalues_numeric(const Eigen::Matrix4cd& rho) {
    Spectrum s = sqrt_t_eigenvalues(rho);
    for (double& v : s) v *= v;
    return s;
}

inline Spectrum t_eigenvalues_numeric(const TwoQubitDensity& rho) { return t_eigenvalues_numeric(rho.canonical()); }

inline double concurrence_from_sqrt_spectrum(const Spectrum& s) { return std::max(0.0, s[0] - s[1] - s[2] - s[3]); }

/// Wootters concurrence, from the numeric eigenvalue path.
inline double concurrence(const Eigen::Matrix4cd& rho) {
    return std::clamp(concurrence_from_sqrt_spectrum(sqrt_t_eigenvalues(rho)), 0.0, 1.0);
}

inline double concurrence(const TwoQubitDensity& rho) { return concurrence(rho.canonical()); }

/// h(y) = -y log2 y - (1-y) log2 (1-y), continuous at the endpoints.
inline double binary_entropy(double y) {
    auto term = [](double x) { return x <= 0.0 ? 0.0 : -x * std::log2(x); };
    return term(y) + term(1.0 - y);
}

inline double eof_from_concurrence(double c) {
    c = std::clamp(c, 0.0, 1.0);
    return std::clamp(binary_entropy(0.5 + 0.5 * std::sqrt(1.0 - c * c)), 0.0, 1.0);
}

inline double entanglement_of_formation(const Eigen::Matrix4cd& rho) { return eof_from_concurrence(concurrence(rho)); }
inline double entanglement_of_formation(const TwoQubitDensity& rho) { return eof_from_concurrence(concurrence(rho)); }

// ---------------------------------------------------------------------------
// Characteristic polynomial E^4 + c3 E^3 + c2 E^2 + c1 E + c0 of T.

struct QuarticCoefficients {
    double c3 = 0.0;
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;

    double operator()(double e) const { return (((e + c3) * e + c2) * e + c1) * e + c0; }
    double derivative(double e) const { return ((4.0 * e + 3.0 * c3) * e + 2.0 * c2) * e + c1; }
};

namespace detail {

inline cplx det3(const Eigen::Matrix4cd& t, int a, int b, int c) {
    return t(a, a) * (t(b, b) * t(c, c) - t(b, c) * t(c, b)) - t(a, b) * (t(b, a) * t(c, c) - t(b, c) * t(c, a)) +
           t(a, c) * (t(b, a) * t(c, b) - t(b, b) * t(c, a));
}

}  // namespace detail

/// Coefficients from the principal-minor expansion of det(T - E I):
/// c3 = -tr T, c2 = sum of 2x2 principal minors, c1 = -sum of 3x3 principal
/// minors, c0 = det T. T has a real spectrum, so imaginary parts are noise.
inline QuarticCoefficients quartic_coefficients(const Eigen::Matrix4cd& t) {
    cplx trace{0.0, 0.0};
    for (int i = 0; i < 4; ++i) trace += t(i, i);

    cplx minors2{0.0, 0.0};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) minors2 += t(i, i) * t(j, j) - t(i, j) * t(j, i);

    cplx minors3{0.0, 0.0};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k) minors3 += detail::det3(t, i, j, k);

    // Cofactor expansion along the first row.
    const cplx det = t(0, 0) * detail::det3(t, 1, 2, 3) -
                     t(0, 1) * (t(1, 0) * (t(2, 2) * t(3, 3) - t(2, 3) * t(3, 2)) -
                                t(1, 2) * (t(2, 0) * t(3, 3) - t(2, 3) * t(3, 0)) +
                                t(1, 3) * (t(2, 0) * t(3, 2) - t(2, 2) * t(3, 0))) +
                     t(0, 2) * (t(1, 0) * (t(2, 1) * t(3, 3) - t(2, 3) * t(3, 1)) -
                                t(1, 1) * (t(2, 0) * t(3, 3) - t(2, 3) * t(3, 0)) +
                                t(1, 3) * (t(2, 0) * t(3, 1) - t(2, 1) * t(3, 0))) -
                     t(0, 3) * (t(1, 0) * (t(2, 1) * t(3, 2) - t(2, 2) * t(3, 1)) -
                                t(1, 1) * (t(2, 0) * t(3, 2) - t(2, 2) * t(3, 0)) +
                                t(1, 2) * (t(2, 0) * t(3, 1) - t(2, 1) * t(3, 0)));

    return {-trace.real(), minors2.real(), -minors3.real(), det.real()};
}

/// The element-wise coefficient sums as commonly transcribed for this
/// problem (missing operators between wrapped terms read as '+'). They
/// assume |T_ij|^2 = T_ij T_ji and drop several minors, so they are only
/// used to report the discrepancy against quartic_coefficients().
inline QuarticCoefficients transcribed_quartic_coefficients(const Eigen::Matrix4cd& m) {
    auto T = [&m](int i, int j) { return m(i - 1, j - 1); };
    auto sq = [&T](int i, int j) { return std::norm(T(i, j)); };
    auto re = [](cplx z) { return z.real(); };

    const cplx c3 = -T(1, 1) - T(2, 2) - T(3, 3) - T(4, 4);
    const cplx c2 = -sq(1, 3) - sq(1, 4) - sq(1, 2) - sq(3, 4) - sq(2, 4) + (T(1, 1) + T(2, 2)) * (T(3, 3) + T(4, 4)) +
                    T(1, 1) * T(2, 2) + T(3, 3) * T(4, 4);
    const cplx c1 = sq(1, 2) * (T(3, 3) + T(4, 4)) + sq(2, 3) * (T(1, 1) + T(4, 4)) + sq(2, 4) * (T(1, 1) + T(3, 3)) +
                    sq(3, 4) * (T(1, 1) + T(2, 2)) + sq(1, 3) * (T(2, 2) + T(4, 4)) + sq(1, 4) * (T(2, 2) + T(3, 3)) -
                    re(T(2, 3) * T(3, 4) * T(4, 2)) - re(T(2, 1) * T(3, 2) * T(1, 3)) - re(T(2, 1) * T(4, 2) * T(1, 4)) -
                    re(T(3, 1) * T(1, 4) * T(4, 3)) -
                    T(1, 1) * (T(1, 1) * T(3, 3) + T(2, 2) * T(3, 3) + T(1, 1) * T(2, 2));
    const cplx c0 = T(1, 1) * T(2, 2) * T(3, 3) * T(4, 4) + sq(1, 3) * sq(2, 4) + sq(1, 4) * sq(2, 3) -
                    T(1, 1) * T(2, 2) * sq(3, 4) - T(1, 1) * T(4, 4) * sq(2, 3) - T(3, 3) * T(4, 4) * sq(1, 2) -
                    T(1, 1) * T(3, 3) * sq(2, 4) - T(2, 2) * T(3, 3) * sq(1, 4) + T(1, 1) * re(T(3, 2) * T(2, 4) * T(4, 3)) +
                    T(2, 2) * re(T(3, 1) * T(1, 4) * T(4, 3)) + T(3, 3) * re(T(2, 1) * T(4, 2) * T(1, 4)) +
                    T(4, 4) * re(T(3, 2) * T(1, 3) * T(4, 3)) - re(T(2, 1) * T(3, 2) * T(1, 4) * T(4, 3)) -
                    re(T(2, 1) * T(4, 2) * T(1, 3) * T(3, 4)) - re(T(3, 1) * T(4, 2) * T(1, 4) * T(2, 3));
    return {c3.real(), c2.real(), c1.real(), c0.real()};
}

// ---------------------------------------------------------------------------
// Closed-form quartic roots through the cubic resolvent.
//
//   E1,2 = -(c3 - sqrt(W/3) -+ 4 O) / 4,   E3,4 = -(c3 + sqrt(W/3) -+ 4 N) / 4
//   O, N = sqrt((O1 + O2 +- O3) / 6) / 2
//   O1 = 3 c3^2 - 8 c2 - V^(1/3),  O2 = -4 V^(-1/3) (c2^2 - 3 c1 c3 + 12 c0)
//   W  = 3 c3^2 - 8 c2 + 2 V^(1/3) + 8 V^(-1/3) (c2^2 - 3 c1 c3 + 12 c0)
//
// Two readings of V and O3 are supported. `transcribed` keeps the commonly
// circulated intermediate expressions (undefined symbol in V5 read as c2,
// lowercase w read as W). `corrected` is the minimal set of edits that makes
// V = 4 (D1 + sqrt(D1^2 - 4 D0^3)) for the usual D0, D1 invariants:
//   V1: 8 c2^2 -> 8 c2^3 and c0 c2 -> 8 c0 c2 inside the bracket
//   V3: 4 c2^2 -> 40 c2^2
//   V5: undefined symbol -> c0, plus the missing 81 c1^4 term
//   V : sqrt(sum / 144) -> sqrt(144 sum), sign picked to avoid cancellation
//   O3: sqrt(3 / W) -> sqrt(27 / W)

enum class QuarticReading { transcribed, corrected };

inline std::string_view to_string(QuarticReading r) { return r == QuarticReading::transcribed ? "transcribed" : "corrected"; }

struct ResolventTerms {
    cplx v, v1, v2, v3, v4, v5;
    cplx w, w1, w2;
    cplx o, n, o1, o2, o3;
};

struct QuarticRoots {
    std::array<cplx, 4> roots;  // E1..E4 in formula order
    ResolventTerms terms;
};

inline QuarticRoots evaluate_resolvent(const QuarticCoefficients& coef, QuarticReading reading) {
    const cplx c3 = coef.c3, c2 = coef.c2, c1 = coef.c1, c0 = coef.c0;
    const bool fixed = reading == QuarticReading::corrected;
    ResolventTerms r{};

    r.v1 = (fixed ? 8.0 * c2 * c2 * c2 : 8.0 * c2 * c2) +
           36.0 * (3.0 * (c1 * c1 + c0 * c3 * c3) - c1 * c2 * c3 - (fixed ? 8.0 : 1.0) * c0 * c2);
    r.v2 = -54.0 * c2 * (c0 * c1 * c3 * c3 * c3 + c1 * c1 * c1 * c3 + 8.0 * c0 * (c1 * c1 + c0 * c3 * c3));
    r.v3 = 3.0 * c1 * c3 * (2.0 * c0 * ((fixed ? 40.0 : 4.0) * c2 * c2 + 3.0 * c1 * c3) - c1 * c2 * c2 * c3);
    r.v4 = 12.0 * (std::pow(c1 * c3, 3) + 4.0 * c0 * c2 * c2 * (8.0 * c0 - c2 * c2) + c2 * c2 * c2 * (c1 * c1 + c0 * c3 * c3));
    r.v5 = fixed ? c0 * c0 * (81.0 * std::pow(c3, 4) + 576.0 * c1 * c3 - 768.0 * c0) + 81.0 * std::pow(c1, 4)
                 : c0 * c0 * (81.0 * std::pow(c3, 4) + 576.0 * c1 * c3 - 768.0 * c2);

    const cplx radicand = r.v2 + r.v3 + r.v4 + r.v5;
    if (fixed) {
        const cplx root = std::sqrt(144.0 * radicand);
        r.v = std::abs(r.v1 + root) >= std::abs(r.v1 - root) ? r.v1 + root : r.v1 - root;
    } else {
        r.v = r.v1 + std::sqrt(radicand / 144.0);
    }

    const cplx d0 = c2 * c2 + 3.0 * (4.0 * c0 - c1 * c3);
    const bool v_zero = std::abs(r.v) < 1e-300;
    const cplx cube = v_zero ? cplx{0.0, 0.0} : std::pow(r.v, 1.0 / 3.0);
    const cplx inv_cube = v_zero ? cplx{0.0, 0.0} : 1.0 / cube;

    r.w1 = 3.0 * c3 * c3 - 8.0 * c2 + 2.0 * cube;
    r.w2 = 8.0 * inv_cube * d0;
    r.w = r.w1 + r.w2;

    r.o1 = 3.0 * c3 * c3 - 8.0 * c2 - cube;
    r.o2 = 4.0 * inv_cube * (3.0 * c1 * c3 - 12.0 * c0 - c2 * c2);
    const cplx skew = 4.0 * c3 * c2 - c3 * c3 * c3 - 8.0 * c1;
    r.o3 = std::abs(r.w) < 1e-300 ? cplx{0.0, 0.0} : std::sqrt((fixed ? 27.0 : 3.0) / r.w) * skew;
    r.o = 0.5 * std::sqrt((r.o1 + r.o2 + r.o3) / 6.0);
    r.n = 0.5 * std::sqrt((r.o1 + r.o2 - r.o3) / 6.0);

    const cplx sw = std::sqrt(r.w / 3.0);
    QuarticRoots out;
    out.terms = r;
    out.roots = {-(c3 - sw - 4.0 * r.o) / 4.0, -(c3 - sw + 4.0 * r.o) / 4.0, -(c3 + sw - 4.0 * r.n) / 4.0,
                 -(c3 + sw + 4.0 * r.n) / 4.0};
    return out;
}

struct QuarticSolution {
    Spectrum roots{};  ///< descending real parts
    bool accepted = false;
    QuarticReading reading = QuarticReading::corrected;
    double worst_newton_step = 0.0;  ///< max |p(E)/p'(E)| over the roots
    ResolventTerms terms{};
};

namespace detail {

inline constexpr double kNewtonTolerance = 2.5e-8;

inline bool roots_pass(const QuarticCoefficients& c, const std::array<cplx, 4>& roots, double& worst_step) {
    const double scale = std::max(1.0, std::pow(std::fabs(c.c3), 4));
    bool ok = true;
    worst_step = 0.0;
    for (const cplx& e : roots) {
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
            worst_step = std::numeric_limits<double>::infinity();
            return false;
        }
        if (std::fabs(e.imag()) > kNewtonTolerance) ok = false;
        const double p = c(e.real());
        const double dp = c.derivative(e.real());
        if (std::fabs(p) > 1e-7 * scale) ok = false;
        const double step = dp != 0.0 ? std::fabs(p / dp) : (p == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        worst_step = std::max(worst_step, step);
    }
    return ok && worst_step <= kNewtonTolerance;
}

}  // namespace detail

/// Closed-form roots with a residual check: each root must be real to 2.5e-8,
/// satisfy |p(E)| <= 1e-7 max(1, c3^4), and have a Newton step |p/p'| of at
/// most 2.5e-8. A root of multiplicity m is then within 4 * 2.5e-8 = 1e-7 of
/// the polynomial's root. Clustered roots near zero (rank-deficient states)
/// usually fail the Newton test because p' is at the noise level of the
/// coefficients. The transcribed reading is tried first, then the corrected
/// one. `accepted == false` means the caller must fall back to the numeric path.
inline QuarticSolution quartic_roots_closed_form(const QuarticCoefficients& c) {
    QuarticSolution best;
    for (QuarticReading reading : {QuarticReading::transcribed, QuarticReading::corrected}) {
        const QuarticRoots r = evaluate_resolvent(c, reading);
        QuarticSolution s;
        s.reading = reading;
        s.terms = r.terms;
        s.accepted = detail::roots_pass(c, r.roots, s.worst_newton_step);
        for (int k = 0; k < 4; ++k) s.roots[static_cast<std::size_t>(k)] = r.roots[static_cast<std::size_t>(k)].real();
        std::sort(s.roots.begin(), s.roots.end(), std::greater<>());
        best = s;
        if (s.accepted) break;
    }
    return best;
}

enum class EigenPath { closed_form_transcribed, closed_form_corrected, numeric_fallback };

inline std::string_view to_string(EigenPath p) {
    switch (p) {
        case EigenPath::closed_form_transcribed: return "closed-form (transcribed)";
        case EigenPath::closed_form_corrected: return "closed-form (corrected)";
        case EigenPath::numeric_fallback: return "numeric fallback";
    }
    return "?";
}

struct ClosedFormEigenvalues {
    Spectrum values{};
    EigenPath path = EigenPath::numeric_fallback;
};

/// T eigenvalues via the closed-form quartic, falling back to the numeric
/// path when the closed form fails its residual check.
inline ClosedFormEigenvalues t_eigenvalues_closed_form(const Eigen::Matrix4cd& rho) {
    detail::checked_sqrt(rho);
    const QuarticSolution s = quartic_roots_closed_form(quartic_coefficients(t_matrix(rho)));
    if (!s.accepted) return {t_eigenvalues_numeric(rho), EigenPath::numeric_fallback};
    ClosedFormEigenvalues out;
    out.path = s.reading == QuarticReading::transcribed ? EigenPath::closed_form_transcribed : EigenPath::closed_form_corrected;
    for (std::size_t k = 0; k < 4; ++k) {
        const double v = s.roots[k];
        if (v < -detail::kNegativeClip) return {t_eigenvalues_numeric(rho), EigenPath::numeric_fallback};
        out.values[k] = std::max(0.0, v);
    }
    return out;
}

}  // namespace kerrcav
