#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kerrcav/audit.hpp"
#include "kerrcav/joint_state.hpp"

using namespace kerrcav;

namespace {

ModelParams params(double chi, double delta, double nbar = 10.0) {
    ModelParams p;
    p.kerr_ratio = chi;
    p.detuning_ratio = delta;
    p.mean_photons = nbar;
    return p;
}

double min_eigenvalue(const Eigen::Matrix4cd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(m).eigenvalues()(0);
}

}  // namespace

TEST(JointState, TwoExcitedAtZeroTime) {
    const ModelParams p = params(0.4, 1.5);
    const JointState s = build_joint_state(Scenario::EE, 0.0, p);
    for (int m = 0; m < s.fock_size(); ++m) {
        EXPECT_EQ(s.coefficient(AtomPair::pp, m), m <= s.cutoff() ? coherent_coefficient(m, 10.0, 0.0) : cplx{});
        EXPECT_EQ(s.coefficient(AtomPair::pm, m), cplx{});
        EXPECT_EQ(s.coefficient(AtomPair::mp, m), cplx{});
        EXPECT_EQ(s.coefficient(AtomPair::mm, m), cplx{});
    }
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
}

TEST(JointState, ExcitedGroundAtZeroTime) {
    const TwoQubitDensity rho = reduce_to_atoms(build_joint_state(Scenario::EG, 0.0, params(0.4, 1.5)));
    EXPECT_EQ(rho.element(2, 2), cplx{});
    EXPECT_EQ(rho.element(4, 4), cplx{});
    EXPECT_NEAR(rho.population(AtomPair::pm), 1.0, 1e-12);
}

TEST(JointState, VacuumLadderByHand) {
    const ModelParams p = params(0, 0, 0.0);
    for (double t : {0.3, 1.1, 2.7}) {
        const TwoQubitDensity rho = reduce_to_atoms(build_joint_state(Scenario::EE, t, p));
        const double c1 = std::cos(t), s1 = std::sin(t);
        const double c2 = std::cos(std::sqrt(2.0) * t), s2 = std::sin(std::sqrt(2.0) * t);
        EXPECT_NEAR(rho.element(1, 1).real(), std::pow(c1, 4), 1e-14);
        EXPECT_NEAR(rho.element(2, 2).real(), c1 * c1 * s1 * s1, 1e-14);
        EXPECT_NEAR(rho.element(3, 3).real(), c2 * c2 * s1 * s1, 1e-14);
        EXPECT_NEAR(rho.element(4, 4).real(), s1 * s1 * s2 * s2, 1e-14);
    }
}

TEST(JointState, NormConservedAndEqualsTrace) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> t(0.0, 50.0), chi(0.0, 1.0), delta(-20.0, 20.0);
    for (Scenario sc : {Scenario::EE, Scenario::EG}) {
        for (int k = 0; k < 50; ++k) {
            const JointState s = build_joint_state(sc, t(rng), params(chi(rng), delta(rng)));
            EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
            EXPECT_NEAR(reduce_to_atoms(s).matrix.trace().real(), s.norm_squared(), 1e-12);
        }
    }
}

TEST(ReduceToAtoms, ProductInitialState) {
    const TwoQubitDensity rho = reduce_to_atoms(build_joint_state(Scenario::EE, 0.0, params(0, 0)));
    Eigen::Matrix4cd expected = Eigen::Matrix4cd::Zero();
    expected(0, 0) = 1.0;
    EXPECT_LT((rho.matrix - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ReduceToAtoms, HermitianUnitTracePositive) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> t(0.0, 50.0), chi(0.0, 1.0), delta(-20.0, 20.0);
    for (Scenario sc : {Scenario::EE, Scenario::EG}) {
        for (int k = 0; k < 100; ++k) {
            const TwoQubitDensity rho = reduce_to_atoms(build_joint_state(sc, t(rng), params(chi(rng), delta(rng))));
            EXPECT_LT((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_NEAR(rho.matrix.trace().real(), 1.0, 1e-10);
            EXPECT_GE(min_eigenvalue(rho.matrix), -1e-10);
        }
    }
}

TEST(ReduceToAtoms, CanonicalReordering) {
    const TwoQubitDensity rho = reduce_to_atoms(build_joint_state(Scenario::EG, 1.7, params(0.2, 3.0)));
    const Eigen::Matrix4cd c = rho.canonical();
    // EG |1> = +-, |2> = ++, |3> = --, |4> = -+
    EXPECT_EQ(c(1, 1), rho.element(1, 1));
    EXPECT_EQ(c(0, 0), rho.element(2, 2));
    EXPECT_EQ(c(3, 3), rho.element(3, 3));
    EXPECT_EQ(c(2, 2), rho.element(4, 4));
    EXPECT_EQ(c(1, 3), rho.element(1, 3));
    EXPECT_EQ(c(0, 2), rho.element(2, 4));
}

TEST(PublishedTable, DiagonalsAgreeWithPartialTrace) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> t(0.0, 50.0), chi(0.0, 1.0), delta(-20.0, 20.0);
    for (Scenario sc : {Scenario::EE, Scenario::EG}) {
        for (int k = 0; k < 50; ++k) {
            const ModelParams p = params(chi(rng), delta(rng));
            const RabiTable tab(p, t(rng));
            const TwoQubitDensity traced = reduce_to_atoms(build_joint_state(sc, tab, p));
            const ElementTable pub = published_element_table(sc, tab, p);
            for (int i = 1; i <= 4; ++i) EXPECT_NEAR(pub.rho.element(i, i).real(), traced.element(i, i).real(), 1e-10);
        }
    }
}

TEST(PublishedTable, TwoExcitedLeadingOffDiagonalsAgree) {
    const ModelParams p = params(0.3, 2.0);
    const RabiTable tab(p, 4.2);
    const TwoQubitDensity traced = reduce_to_atoms(build_joint_state(Scenario::EE, tab, p));
    const ElementTable pub = published_element_table(Scenario::EE, tab, p);
    for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {1, 4}, {2, 3}})
        EXPECT_LT(std::abs(pub.rho.element(i, j) - traced.element(i, j)), 1e-10) << i << j;
}

TEST(PublishedTable, SharedExpressionForTwoFourAndThreeFour) {
    const ModelParams p = params(0.0, 0.0);
    const RabiTable tab(p, 5.0 * std::numbers::pi / 3.0);
    const TwoQubitDensity traced = reduce_to_atoms(build_joint_state(Scenario::EE, tab, p));
    const ElementTable pub = published_element_table(Scenario::EE, tab, p);
    EXPECT_EQ(pub.rho.element(2, 4), pub.rho.element(3, 4));
    EXPECT_GT(std::abs(traced.element(2, 4) - traced.element(3, 4)), 1e-3);
    EXPECT_GT(std::abs(pub.rho.element(2, 4) - traced.element(2, 4)), 1e-3);
}

TEST(PublishedTable, UndefinedIndexEntrySubstituted) {
    const ModelParams p = params(0.5, 1.0);
    const RabiTable tab(p, 2.0);
    const TwoQubitDensity traced = reduce_to_atoms(build_joint_state(Scenario::EG, tab, p));
    const ElementTable pub = published_element_table(Scenario::EG, tab, p);
    EXPECT_EQ(pub.rho.element(1, 3), traced.element(1, 3));
    ASSERT_FALSE(pub.notes.empty());
    EXPECT_NE(pub.notes.front().find("undefined symbol k"), std::string::npos);
}

TEST(FieldOverlap, CoherentSelfOverlap) {
    const ModelParams p = params(0, 0);
    const JointState s = build_joint_state(Scenario::EE, 0.0, p);
    EXPECT_NEAR(std::abs(field_block_overlap(s, AtomPair::pp, cplx(std::sqrt(10.0), 0.0))), 1.0, 1e-12);
    EXPECT_EQ(field_block_overlap(s, AtomPair::mm, cplx(1.0, 2.0)), cplx{});
}

TEST(FieldOverlap, DisplacedCoherentOverlap) {
    ModelParams p = params(0, 0);
    p.fock_cutoff = 90;  // the default cutoff leaves a ~1e-10 tail at this displacement
    const JointState s = build_joint_state(Scenario::EE, 0.0, p);
    const cplx a0(std::sqrt(10.0), 0.0), a = a0 + std::polar(2.0, 0.7);
    EXPECT_NEAR(std::norm(field_block_overlap(s, AtomPair::pp, a)), std::exp(-4.0), 1e-12);
}

TEST(FieldOverlap, PublishedFormsMatchState) {
    const ModelParams p = params(0.2, 3.0);
    const RabiTable tab(p, 3.3);
    for (Scenario sc : {Scenario::EE, Scenario::EG}) {
        const JointState s = build_joint_state(sc, tab, p);
        for (cplx a : {cplx(0.0, 0.0), cplx(3.0, 1.0), cplx(-2.0, -2.5), cplx(6.0, 0.0)}) {
            const PublishedOverlaps po = published_overlaps(sc, tab, p, a);
            EXPECT_LT(std::abs(po.pp - field_block_overlap(s, AtomPair::pp, a)), 1e-10);
            EXPECT_LT(std::abs(po.mm - field_block_overlap(s, AtomPair::mm, a)), 1e-10);
        }
    }
}

TEST(FieldOverlap, FarFieldFlushesToZero) {
    const JointState s = build_joint_state(Scenario::EE, 1.0, params(0, 0));
    EXPECT_EQ(field_block_overlap(s, AtomPair::pp, cplx(60.0, 0.0)), cplx{});
}

TEST(JointState, TruncationDeficitRaised) {
    ModelParams p = params(0, 0);
    p.fock_cutoff = 5;
    EXPECT_THROW(build_joint_state(Scenario::EE, 1.0, p), TruncationError);
}

TEST(JointState, RejectsNegativeTime) {
    EXPECT_THROW(build_joint_state(Scenario::EE, -1.0, params(0, 0)), std::invalid_argument);
}
