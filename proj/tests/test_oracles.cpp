#include "ssocert/oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ssocert;
using testutil::diag;
using testutil::mat;
using testutil::sym_unit;
using testutil::unit;

namespace {

const auto kPsd3 = StructuredConvexFunction::psd_indicator(3);
const auto kNuc22 = StructuredConvexFunction::nuclear_norm(2, 2);

}  // namespace

TEST(FdProxJacobian, PositiveDefinitePointIsIdentity) {
    Rng rng(51);
    const Matrix p = rng.normal_matrix(3, 3);
    const Matrix w = p * p.transpose() + Matrix::Identity(3, 3);
    const OracleReport r = fd_prox_jacobian(kPsd3, w, rng.symmetric_matrix(3));
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.rel_gap, 1e-9);
}

TEST(FdProxJacobian, DifferentiableFace) {
    Rng rng(52);
    for (int t = 0; t < 20; ++t) {
        const OracleReport r = fd_prox_jacobian(kPsd3, diag({2, 0.5, -3}), rng.symmetric_matrix(3));
        EXPECT_TRUE(r.pass) << r.rel_gap;
        EXPECT_FALSE(r.flagged);
    }
}

TEST(FdProxJacobian, KinkIsFlagged) {
    const OracleReport r = fd_prox_jacobian(kPsd3, diag({2, 0, -3}), sym_unit(3, 0, 1));
    EXPECT_TRUE(r.flagged);
    EXPECT_FALSE(r.pass);
    const OracleReport n = fd_prox_jacobian(kNuc22, diag({3, 1}), unit(2, 2, 0, 1));
    EXPECT_TRUE(n.flagged);
}

TEST(Delta2Quotient, FrameN1) {
    const Matrix x = diag({2, 0});
    const Matrix u = diag({1, 0.5});
    OracleReport r = delta2_quotient(kNuc22, x, u, unit(2, 2, 0, 1));
    EXPECT_TRUE(r.pass) << r.oracle;
    EXPECT_NEAR(r.closed_form, 0.5, 1e-12);
    EXPECT_NEAR(r.oracle, 0.5, 5e-3);

    r = delta2_quotient(kNuc22, x, u, unit(2, 2, 0, 0));
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.oracle, 0.0, 1e-6);
}

TEST(Delta2Quotient, CouplingThroughZeroBlockIsOnlyAnUpperBound) {
    // Along E12 + E21 the fixed-direction quotient tends to 2 while Γ = 0.5:
    // reaching Γ needs a second-order correction of the path in the zero block.
    const OracleReport r = delta2_quotient(kNuc22, diag({2, 0}), diag({1, 0.5}), mat({{0, 1}, {1, 0}}));
    EXPECT_NEAR(r.closed_form, 0.5, 1e-12);
    EXPECT_NEAR(r.oracle, 2.0, 1e-2);
    EXPECT_GE(r.oracle, r.closed_form);
    EXPECT_FALSE(r.pass);
}

TEST(Delta2Quotient, RejectsPsd) {
    EXPECT_THROW(delta2_quotient(kPsd3, diag({2, 0, 0}), diag({0, 0, -3}), sym_unit(3, 0, 2)), DomainError);
}

TEST(GammaBruteForce, Examples) {
    const SpectralFrame psd = frame_at(kPsd3, diag({2, 0, -3}));
    EXPECT_NEAR(gamma_bruteforce(psd, sym_unit(3, 0, 2), 64), 3.0, 1e-12);
    EXPECT_EQ(gamma_bruteforce(psd, Matrix::Zero(3, 3), 64), 0.0);
    EXPECT_TRUE(std::isinf(gamma_bruteforce(psd, sym_unit(3, 1, 2), 64)));

    const SpectralFrame nuc = frame_at(kNuc22, diag({3, 0.5}));
    EXPECT_NEAR(gamma_bruteforce(nuc, unit(2, 2, 0, 1), 64), 0.5, 1e-12);
}

TEST(GammaBruteForce, DimensionCap) {
    const auto big = StructuredConvexFunction::nuclear_norm(6, 7);
    EXPECT_THROW(GammaBruteForce(frame_at(big, Matrix::Zero(6, 7)), 4), ShapeError);
}

TEST(ChainCheck, ScalarExamples) {
    const Matrix one = mat({{1}});
    const Matrix zero = mat({{0}});
    const Vector d = (Vector(1) << 1).finished();
    OracleReport r = coderivative_chain_check(one, one, d, 3.0);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.closed_form, 0.0, 1e-15);

    r = coderivative_chain_check(zero, one, d, 3.0);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.closed_form, 1.0, 1e-15);

    r = coderivative_chain_check(mat({{0.5}}), one, d, 3.0);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.closed_form, 0.0625, 1e-15);
    EXPECT_NEAR(r.oracle, 0.0, 1e-15);
}

TEST(ChainCheck, RandomFrames) {
    Rng rng(53);
    for (int t = 0; t < 40; ++t) {
        const bool psd = t % 2 == 0;
        SignPattern s(3);
        for (auto& v : s) v = static_cast<int>(rng.index(3)) - 1;
        const auto g = psd ? kPsd3 : StructuredConvexFunction::nuclear_norm(3, 3);
        const Matrix a = psd ? random_psd_point(rng, s) : random_nuclear_point(rng, 3, 3, s);
        const OracleReport r = coderivative_chain_check(frame_at(g, a), {2, 10, 100}, 5, rng.bits());
        EXPECT_TRUE(r.pass) << r.detail;
    }
}

TEST(RandomPoints, RespectRequestedClasses) {
    Rng rng(54);
    for (int t = 0; t < 50; ++t) {
        const SpectralFrame f = frame_at(kPsd3, random_psd_point(rng, {1, 0, -1}));
        EXPECT_EQ(f.upper.size(), 1u);
        EXPECT_EQ(f.boundary.size(), 1u);
        EXPECT_EQ(f.lower.size(), 1u);
        const auto g = StructuredConvexFunction::nuclear_norm(2, 3);
        const SpectralFrame n = frame_at(g, random_nuclear_point(rng, 2, 3, {1, 0}));
        EXPECT_EQ(n.upper.size(), 1u);
        EXPECT_EQ(n.boundary.size(), 1u);
    }
}

TEST(SplitPoint, GivesValidPair) {
    Rng rng(55);
    for (int t = 0; t < 50; ++t) {
        const Matrix a = random_nuclear_point(rng, 2, 2, {1, -1});
        const SubgradientPair pair = split_point(kNuc22, a);
        EXPECT_TRUE(subgradient_check(kNuc22, pair.x, pair.u).valid);
    }
}

TEST(Selftest, AllSuitesPass) {
    const auto reports = run_selftest(SelftestOptions{30, 7});
    EXPECT_EQ(reports.size(), 7u);
    for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.quantity << ": " << r.detail;
}
