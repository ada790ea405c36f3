#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kerrcav/errors.hpp"
#include "kerrcav/model.hpp"

namespace kerrcav {

/// Injection order of the two atoms.
enum class Scenario {
    EE,  ///< both atoms enter excited
    EG,  ///< excited atom followed by a ground-state atom
};

inline std::string_view to_string(Scenario s) { return s == Scenario::EE ? "EE" : "EG"; }

/// Joint atomic label (first atom, second atom); the enumerator value is the
/// canonical index in the {++, +-, -+, --} basis.
enum class AtomPair : int { pp = 0, pm = 1, mp = 2, mm = 3 };

inline std::string_view to_string(AtomPair p) {
    switch (p) {
        case AtomPair::pp: return "++";
        case AtomPair::pm: return "+-";
        case AtomPair::mp: return "-+";
        case AtomPair::mm: return "--";
    }
    return "??";
}

/// Scenario-local labelling of the basis states |1>..|4>.
inline std::array<AtomPair, 4> basis_ordering(Scenario s) {
    if (s == Scenario::EE) return {AtomPair::pp, AtomPair::pm, AtomPair::mp, AtomPair::mm};
    return {AtomPair::pm, AtomPair::pp, AtomPair::mm, AtomPair::mp};
}

/// Two atoms + cavity field after both transits, stored as one field vector
/// per atomic label.
class JointState {
public:
    JointState(Scenario scenario, double t, int cutoff)
        : scenario_(scenario), t_(t), cutoff_(cutoff) {
        for (auto& b : blocks_) b.assign(static_cast<std::size_t>(cutoff) + 3, cplx{0.0, 0.0});
    }

    Scenario scenario() const { return scenario_; }
    double time() const { return t_; }
    int cutoff() const { return cutoff_; }
    /// Fock indices run over 0..fock_size()-1.
    int fock_size() const { return cutoff_ + 3; }

    std::span<const cplx> block(AtomPair pair) const { return blocks_[index(pair)]; }

    cplx coefficient(AtomPair pair, int m) const {
        if (m < 0 || m >= fock_size()) return {0.0, 0.0};
        return blocks_[index(pair)][static_cast<std::size_t>(m)];
    }

    double block_norm_squared(AtomPair pair) const {
        double s = 0.0;
        for (const cplx& c : blocks_[index(pair)]) s += std::norm(c);
        return s;
    }

    double norm_squared() const {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += block_norm_squared(static_cast<AtomPair>(k));
        return s;
    }

    void add(AtomPair pair, int m, cplx value) {
        if (m < 0 || m >= fock_size()) throw std::out_of_range("Fock index " + std::to_string(m) + " outside state");
        blocks_[index(pair)][static_cast<std::size_t>(m)] += value;
    }

private:
    static std::size_t index(AtomPair p) { return static_cast<std::size_t>(p); }

    Scenario scenario_;
    double t_;
    int cutoff_;
    std::array<std::vector<cplx>, 4> blocks_;
};

/// Reduced two-atom state, stored in the scenario's basis ordering.
struct TwoQubitDensity {
    Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();
    Scenario scenario = Scenario::EE;
    double t = 0.0;

    /// Element rho_ij with 1-based scenario indices.
    cplx element(int i, int j) const { return matrix(i - 1, j - 1); }

    double population(AtomPair pair) const {
        const auto order = basis_ordering(scenario);
        for (int k = 0; k < 4; ++k)
            if (order[static_cast<std::size_t>(k)] == pair) return matrix(k, k).real();
        return 0.0;
    }

    /// Same operator in the {++, +-, -+, --} ordering.
    Eigen::Matrix4cd canonical() const {
        const auto order = basis_ordering(scenario);
        Eigen::Matrix4cd out;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                out(static_cast<int>(order[static_cast<std::size_t>(i)]), static_cast<int>(order[static_cast<std::size_t>(j)])) =
                    matrix(i, j);
        return out;
    }
};

/// Builds the joint state from a precomputed table of one-atom amplitudes.
///
/// EE: the second excited atom meets the field left by the first, so each
/// Fock component n of the first pass splits again through the same
/// {|m,+>, |m+1,->} dynamics.
///
/// EG: the ground atom meeting |m> couples to |m-1,+>. Its survival
/// amplitude is taken as conj(Gamma_1(m-1)); for the empty cavity nothing
/// couples and the amplitude is 1. The (--) component carries
/// conj(Gamma_1(n)) Gamma_2(n+1) on |n+1>, which is what keeps the state
/// normalised and reproduces the closed-form (3,3) population.
inline JointState build_joint_state(Scenario scenario, const RabiTable& table, const ModelParams& params) {
    const int cutoff = table.cutoff();
    JointState state(scenario, table.time(), cutoff);
    for (int n = 0; n <= cutoff; ++n) {
        const cplx c = coherent_coefficient(n, params.mean_photons, params.coherent_phase);
        if (c == cplx{0.0, 0.0}) continue;
        if (scenario == Scenario::EE) {
            state.add(AtomPair::pp, n, c * table.gamma1(n) * table.gamma1(n));
            state.add(AtomPair::pm, n + 1, c * table.gamma1(n) * table.gamma2(n + 1));
            state.add(AtomPair::mp, n + 1, c * table.gamma1(n + 1) * table.gamma2(n + 1));
            state.add(AtomPair::mm, n + 2, c * table.gamma2(n + 1) * table.gamma2(n + 2));
        } else {
            const cplx survive = n == 0 ? cplx{1.0, 0.0} : std::conj(table.gamma1(n - 1));
            state.add(AtomPair::pm, n, c * table.gamma1(n) * survive);
            if (n >= 1) state.add(AtomPair::pp, n - 1, c * table.gamma1(n) * table.gamma2(n));
            state.add(AtomPair::mm, n + 1, c * std::conj(table.gamma1(n)) * table.gamma2(n + 1));
            state.add(AtomPair::mp, n, c * table.gamma2(n + 1) * table.gamma2(n + 1));
        }
    }

    const double norm = state.norm_squared();
    if (norm < 1.0 - 100.0 * params.truncation_epsilon)
        throw TruncationError("joint state norm " + std::to_string(norm) + " below 1 - 100 eps; raise the Fock cutoff");
    return state;
}

inline JointState build_joint_state(Scenario scenario, double t, const ModelParams& params) {
    validate(params);
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("transit time must be finite and >= 0");
    return build_joint_state(scenario, RabiTable(params, t), params);
}

/// Partial trace over the field: rho_ij = sum_m f_i(m) conj(f_j(m)).
inline TwoQubitDensity reduce_to_atoms(const JointState& state) {
    const auto order = basis_ordering(state.scenario());
    TwoQubitDensity rho;
    rho.scenario = state.scenario();
    rho.t = state.time();
    for (int i = 0; i < 4; ++i) {
        const auto fi = state.block(order[static_cast<std::size_t>(i)]);
        for (int j = i; j < 4; ++j) {
            const auto fj = state.block(order[static_cast<std::size_t>(j)]);
            cplx s{0.0, 0.0};
            for (std::size_t m = 0; m < fi.size(); ++m) s += fi[m] * std::conj(fj[m]);
            rho.matrix(i, j) = s;
            rho.matrix(j, i) = std::conj(s);
        }
        rho.matrix(i, i) = rho.matrix(i, i).real();
    }
    return rho;
}

/// Log-magnitude/phase form of one field vector for repeated coherent-state
/// projections.
class BlockProjector {
public:
    explicit BlockProjector(std::span<const cplx> block) {
        for (std::size_t m = 0; m < block.size(); ++m) {
            if (block[m] == cplx{0.0, 0.0}) continue;
            const int mi = static_cast<int>(m);
            terms_.push_back({mi, std::log(std::abs(block[m])) - 0.5 * log_factorial(mi), std::arg(block[m])});
        }
    }

    /// <alpha| f> = e^{-|alpha|^2/2} sum_m conj(alpha)^m / sqrt(m!) f_m.
    cplx overlap(cplx alpha) const {
        if (terms_.empty()) return {0.0, 0.0};
        const double r = std::abs(alpha);
        const double log_r = r > 0.0 ? std::log(r) : -std::numeric_limits<double>::infinity();
        const double theta = std::arg(alpha);
        const double gauss = -0.5 * r * r;

        auto log_term = [&](const Term& t) { return t.m == 0 ? gauss + t.log_weight : gauss + t.m * log_r + t.log_weight; };
        double peak = -std::numeric_limits<double>::infinity();
        for (const Term& t : terms_) peak = std::max(peak, log_term(t));
        if (peak < kLogFlush) return {0.0, 0.0};

        cplx sum{0.0, 0.0};
        for (const Term& t : terms_) {
            const double rel = log_term(t) - peak;
            if (rel < -745.0) continue;
            sum += std::polar(std::exp(rel), t.phase - t.m * theta);
        }
        const double scale = std::exp(peak);
        const cplx out = scale * sum;
        if (std::abs(out) < 1e-300) return {0.0, 0.0};
        return out;
    }

private:
    struct Term {
        int m;
        double log_weight;  // log|f_m| - log(m!)/2
        double phase;
    };
    static constexpr double kLogFlush = -690.7755;  // log(1e-300)

    std::vector<Term> terms_;
};

/// Projection of the field vector attached to `pair` onto the coherent state |alpha>.
inline cplx field_block_overlap(const JointState& state, AtomPair pair, cplx alpha) {
    return BlockProjector(state.block(pair)).overlap(alpha);
}

}  // namespace kerrcav
