#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "kerrcav/entanglement.hpp"
#include "kerrcav/sampling.hpp"

using namespace kerrcav;

namespace {

Eigen::Matrix4cd projector(const Eigen::Vector4cd& v) { return v * v.adjoint() / v.squaredNorm(); }

Eigen::Matrix4cd bell() { return projector(Eigen::Vector4cd(1, 0, 0, 1)); }

Eigen::Matrix4cd werner(double p) { return p * bell() + (1.0 - p) * Eigen::Matrix4cd::Identity() / 4.0; }

Eigen::Matrix4cd basis_state(int k) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(k, k) = 1.0;
    return m;
}

}  // namespace

TEST(SpinFlip, Examples) {
    EXPECT_LT((spin_flip(basis_state(0)) - basis_state(3)).cwiseAbs().maxCoeff(), 1e-15);
    const Eigen::Matrix4cd mixed = Eigen::Matrix4cd::Identity() / 4.0;
    EXPECT_LT((spin_flip(mixed) - mixed).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((spin_flip(bell()) - bell()).cwiseAbs().maxCoeff(), 1e-15);
    const Eigen::Matrix4cd singlet = projector(Eigen::Vector4cd(0, 1, -1, 0));
    EXPECT_LT((spin_flip(singlet) - singlet).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SpinFlip, PreservesTraceHermiticityAndPositivity) {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 100; ++k) {
        const Eigen::Matrix4cd rho = random_density_matrix(rng, 1 + k % 4);
        const Eigen::Matrix4cd f = spin_flip(rho);
        EXPECT_NEAR(f.trace().real(), 1.0, 1e-12);
        EXPECT_LT((f - f.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(f).eigenvalues()(0), -1e-12);
        EXPECT_LT((spin_flip(f) - rho).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(TEigenvalues, Examples) {
    const Spectrum b = t_eigenvalues_numeric(bell());
    EXPECT_NEAR(b[0], 1.0, 1e-12);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(b[static_cast<std::size_t>(k)], 0.0, 1e-12);
    for (double e : t_eigenvalues_numeric(Eigen::Matrix4cd::Identity() / 4.0)) EXPECT_NEAR(e, 1.0 / 16.0, 1e-15);
    for (double e : t_eigenvalues_numeric(basis_state(0))) EXPECT_NEAR(e, 0.0, 1e-15);
}

TEST(TEigenvalues, DescendingAndSumToTrace) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 200; ++k) {
        const Eigen::Matrix4cd rho = random_density_matrix(rng, 1 + k % 4);
        const Spectrum e = t_eigenvalues_numeric(rho);
        EXPECT_TRUE(std::is_sorted(e.begin(), e.end(), std::greater<>()));
        EXPECT_GE(e[3], 0.0);
        EXPECT_NEAR(e[0] + e[1] + e[2] + e[3], t_matrix(rho).trace().real(), 1e-9);
    }
}

TEST(TEigenvalues, InvalidDensityRejected) {
    Eigen::Matrix4cd bad = Eigen::Matrix4cd::Zero();
    bad(0, 0) = 1.2;
    bad(1, 1) = -0.2;
    EXPECT_THROW(t_eigenvalues_numeric(bad), InvalidDensityError);
    Eigen::Matrix4cd skew = bell();
    skew(0, 3) = cplx(0.5, 0.3);
    EXPECT_THROW(t_eigenvalues_numeric(skew), InvalidDensityError);
}

TEST(TEigenvalues, TinyNegativeNoiseClipped) {
    Eigen::Matrix4cd rho = basis_state(0);
    rho(3, 3) = -5e-10;
    EXPECT_NO_THROW(t_eigenvalues_numeric(rho));
}

TEST(QuarticCoefficientsTest, KnownCases) {
    const QuarticCoefficients zero = quartic_coefficients(Eigen::Matrix4cd::Zero());
    EXPECT_EQ(zero.c3, 0.0);
    EXPECT_EQ(zero.c2, 0.0);
    EXPECT_EQ(zero.c1, 0.0);
    EXPECT_EQ(zero.c0, 0.0);
    const QuarticCoefficients c = quartic_coefficients(Eigen::Matrix4cd::Identity() / 16.0);
    EXPECT_NEAR(c.c3, -1.0 / 4.0, 1e-17);
    EXPECT_NEAR(c.c2, 3.0 / 128.0, 1e-17);
    EXPECT_NEAR(c.c1, -1.0 / 1024.0, 1e-18);
    EXPECT_NEAR(c.c0, 1.0 / 65536.0, 1e-19);
}

TEST(QuarticCoefficientsTest, VanishAtNumericEigenvalues) {
    std::mt19937_64 rng(6);
    for (int k = 0; k < 200; ++k) {
        const Eigen::Matrix4cd rho = random_density_matrix(rng, 1 + k % 4);
        const Eigen::Matrix4cd t = t_matrix(rho);
        const QuarticCoefficients c = quartic_coefficients(t);
        const double scale = std::max(1.0, std::pow(t.norm(), 4));
        for (double e : t_eigenvalues_numeric(rho)) EXPECT_LE(std::fabs(c(e)), 1e-7 * scale);
    }
}

TEST(QuarticRoots, QuadrupleRoot) {
    const QuarticSolution s = quartic_roots_closed_form(quartic_coefficients(Eigen::Matrix4cd::Identity() / 16.0));
    ASSERT_TRUE(s.accepted);
    for (double e : s.roots) EXPECT_NEAR(e, 1.0 / 16.0, 1e-12);
}

TEST(QuarticRoots, BellState) {
    const QuarticSolution s = quartic_roots_closed_form(quartic_coefficients(t_matrix(bell())));
    ASSERT_TRUE(s.accepted);
    EXPECT_NEAR(s.roots[0], 1.0, 1e-12);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(s.roots[static_cast<std::size_t>(k)], 0.0, 1e-12);
}

TEST(QuarticRoots, TranscribedReadingFailsResidualCheck) {
    // A generic full-rank state: the printed intermediates do not give roots.
    std::mt19937_64 rng(12);
    const QuarticCoefficients c = quartic_coefficients(t_matrix(random_density_matrix(rng)));
    const QuarticRoots r = evaluate_resolvent(c, QuarticReading::transcribed);
    double worst = 0.0;
    for (const cplx& e : r.roots) worst = std::max(worst, std::abs(c(e.real())));
    EXPECT_GT(worst, 1e-9);
    const QuarticSolution s = quartic_roots_closed_form(c);
    EXPECT_TRUE(s.accepted);
    EXPECT_EQ(s.reading, QuarticReading::corrected);
}

TEST(QuarticRoots, AgreesWithNumericPath) {
    std::mt19937_64 rng(13);
    std::array<int, 5> accepted{}, total{};
    for (int k = 0; k < 1000; ++k) {
        const int rank = 1 + k % 4;
        const Eigen::Matrix4cd rho = random_density_matrix(rng, rank);
        ++total[rank];
        const ClosedFormEigenvalues closed = t_eigenvalues_closed_form(rho);
        if (closed.path == EigenPath::numeric_fallback) continue;
        ++accepted[rank];
        const Spectrum numeric = t_eigenvalues_numeric(rho);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(closed.values[i], numeric[i], 1e-7);
    }
    // Clustered zero roots of rank-deficient states may fall back; generic states must not.
    EXPECT_EQ(accepted[3], total[3]);
    EXPECT_EQ(accepted[4], total[4]);
}

TEST(QuarticRoots, FallbackReturnsNumericValues) {
    std::mt19937_64 rng(29);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Matrix4cd rho = random_density_matrix(rng, 1);
        const ClosedFormEigenvalues closed = t_eigenvalues_closed_form(rho);
        if (closed.path != EigenPath::numeric_fallback) continue;
        EXPECT_EQ(closed.values, t_eigenvalues_numeric(rho));
    }
}

TEST(Concurrence, BellProductWerner) {
    EXPECT_NEAR(concurrence(bell()), 1.0, 1e-12);
    EXPECT_EQ(concurrence(basis_state(1)), 0.0);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) {
        const Eigen::Matrix2cd u1 = random_qubit_unitary(rng), u2 = random_qubit_unitary(rng);
        EXPECT_NEAR(concurrence(apply_local_unitaries(basis_state(0), u1, u2)), 0.0, 1e-12);
    }
    for (double p : {0.0, 0.25, 0.4, 0.8, 1.0}) EXPECT_NEAR(concurrence(werner(p)), std::max(0.0, (3 * p - 1) / 2), 1e-10);
    EXPECT_EQ(concurrence(werner(0.25)), 0.0);
}

TEST(Concurrence, PureStateFormula) {
    // C = 2 |ad - bc| for a|++> + b|+-> + c|-+> + d|-->
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n;
    for (int k = 0; k < 100; ++k) {
        Eigen::Vector4cd v;
        for (int i = 0; i < 4; ++i) v(i) = cplx(n(rng), n(rng));
        v.normalize();
        EXPECT_NEAR(concurrence(projector(v)), 2.0 * std::abs(v(0) * v(3) - v(1) * v(2)), 1e-9);
    }
}

TEST(Concurrence, LocalUnitaryInvariance) {
    std::mt19937_64 rng(19);
    for (int k = 0; k < 200; ++k) {
        const Eigen::Matrix4cd rho = random_density_matrix(rng, 1 + k % 4);
        const Eigen::Matrix4cd moved = apply_local_unitaries(rho, random_qubit_unitary(rng), random_qubit_unitary(rng));
        EXPECT_NEAR(concurrence(rho), concurrence(moved), 1e-10);
    }
}

TEST(Concurrence, RangeOnRandomStates) {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 500; ++k) {
        const Eigen::Matrix4cd rho = random_density_matrix(rng, 1 + k % 4);
        const double c = concurrence(rho);
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
        const double e = entanglement_of_formation(rho);
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 1.0);
    }
}

TEST(EntanglementOfFormation, Values) {
    EXPECT_NEAR(eof_from_concurrence(1.0), 1.0, 1e-15);
    EXPECT_EQ(eof_from_concurrence(0.0), 0.0);
    EXPECT_NEAR(eof_from_concurrence(0.6), 0.4689955935892812213, 1e-15);
    EXPECT_NEAR(binary_entropy(0.9), 0.4689955935892812213, 1e-15);
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    EXPECT_NEAR(entanglement_of_formation(bell()), 1.0, 1e-12);
}

TEST(EntanglementOfFormation, StrictlyIncreasing) {
    double previous = eof_from_concurrence(0.0);
    for (int k = 1; k <= 1000; ++k) {
        const double e = eof_from_concurrence(k / 1000.0);
        EXPECT_GT(e, previous);
        previous = e;
    }
}

TEST(Concurrence, ScenarioOrderingHandled) {
    // |+-> + |-+> Bell state stored in the EG ordering {+-, ++, --, -+}.
    TwoQubitDensity rho;
    rho.scenario = Scenario::EG;
    rho.matrix.setZero();
    rho.matrix(0, 0) = rho.matrix(3, 3) = rho.matrix(0, 3) = rho.matrix(3, 0) = 0.5;
    EXPECT_NEAR(concurrence(rho), 1.0, 1e-12);
}
