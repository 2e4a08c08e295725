#include "ssocert/oracles.hpp"
#include "ssocert/prox.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ssocert;
using testutil::diag;
using testutil::mat;

namespace {

const auto kPsd3 = StructuredConvexFunction::psd_indicator(3);
const auto kNuc22 = StructuredConvexFunction::nuclear_norm(2, 2);

Matrix random_input(Rng& rng, const StructuredConvexFunction& g) {
    return g.kind() == FunctionKind::PsdIndicator ? rng.symmetric_matrix(g.rows())
                                                  : rng.normal_matrix(g.rows(), g.cols());
}

std::vector<StructuredConvexFunction> kinds() {
    return {StructuredConvexFunction::psd_indicator(1), StructuredConvexFunction::psd_indicator(2),
            StructuredConvexFunction::psd_indicator(4), StructuredConvexFunction::nuclear_norm(1, 3),
            StructuredConvexFunction::nuclear_norm(2, 2), StructuredConvexFunction::nuclear_norm(3, 4)};
}

}  // namespace

TEST(Prox, PsdClipsDiagonal) {
    EXPECT_EQ(prox_apply(kPsd3, 1.0, diag({2, 0, -3})), diag({2, 0, 0}));
    EXPECT_EQ(prox_apply(kPsd3, 7.5, diag({2, 0, -3})), diag({2, 0, 0}));
}

TEST(Prox, NuclearShrinksSingularValues) {
    EXPECT_LE((prox_apply(kNuc22, 1.0, diag({3, 0.5})) - diag({2, 0})).norm(), 1e-14);
    EXPECT_LE((prox_apply(kNuc22, 0.25, diag({3, 0.5})) - diag({2.75, 0.25})).norm(), 1e-14);
}

TEST(Prox, PsdOffDiagonalPair) {
    const auto g = StructuredConvexFunction::psd_indicator(2);
    const Matrix p = prox_apply(g, 1.0, mat({{0, 1}, {1, 0}}));
    EXPECT_LE((p - Matrix::Constant(2, 2, 0.5)).norm(), 1e-14);
}

TEST(Prox, ShapeAndSymmetryErrors) {
    EXPECT_THROW(prox_apply(kPsd3, 1.0, Matrix::Zero(2, 2)), ShapeError);
    EXPECT_THROW(prox_apply(kPsd3, 1.0, mat({{0, 1, 0}, {0, 0, 0}, {0, 0, 0}})), DomainError);
    EXPECT_THROW(prox_apply(kNuc22, 0.0, diag({1, 1})), DomainError);
    EXPECT_THROW(StructuredConvexFunction::nuclear_norm(3, 2), ShapeError);
}

TEST(ProxConjugate, Examples) {
    for (double sigma : {0.1, 1.0, 10.0})
        EXPECT_LE((prox_conjugate_apply(kPsd3, sigma, diag({2, 0, -3})) - diag({0, 0, -3})).norm(), 1e-14);
    EXPECT_LE((prox_conjugate_apply(kNuc22, 1.0, diag({3, 0.5})) - diag({1, 0.5})).norm(), 1e-14);
}

TEST(ProxConjugate, MoreauIdentity) {
    Rng rng(21);
    for (const auto& g : kinds()) {
        for (double sigma : {0.1, 1.0, 10.0}) {
            for (int t = 0; t < 50; ++t) {
                const Matrix w = 3.0 * random_input(rng, g);
                // Prox_{σg*}(w) + σ Prox_{σ⁻¹g}(w/σ) = w
                const Matrix sum = prox_conjugate_apply(g, sigma, w) + sigma * prox_apply(g, 1.0 / sigma, w / sigma);
                EXPECT_LE((sum - w).norm(), 1e-12 * (1.0 + w.norm()));
                if (sigma == 1.0) {
                    EXPECT_LE((prox_apply(g, 1.0, w) + prox_conjugate_apply(g, 1.0, w) - w).norm(), 1e-12 * (1.0 + w.norm()));
                }
            }
        }
    }
}

TEST(Prox, Nonexpansive) {
    Rng rng(22);
    int count = 0;
    for (const auto& g : kinds()) {
        for (double sigma : {0.1, 1.0, 10.0}) {
            for (int t = 0; t < 56; ++t, ++count) {
                const Matrix a = 2.0 * random_input(rng, g);
                const Matrix b = 2.0 * random_input(rng, g);
                const Matrix pa = prox_apply(g, sigma, a);
                const Matrix pb = prox_apply(g, sigma, b);
                EXPECT_LE((pa - pb).norm(), (a - b).norm() + 1e-12);
                // firm nonexpansiveness
                EXPECT_GE((pa - pb).cwiseProduct(a - b).sum(), (pa - pb).squaredNorm() - 1e-10);
            }
        }
    }
    EXPECT_GE(count, 1000);
}

TEST(Prox, PsdProjectionIdempotent) {
    Rng rng(23);
    const auto g = StructuredConvexFunction::psd_indicator(4);
    for (int t = 0; t < 200; ++t) {
        const Matrix p = prox_apply(g, 1.0, rng.symmetric_matrix(4));
        EXPECT_LE((prox_apply(g, 1.0, p) - p).norm(), 1e-12 * (1.0 + p.norm()));
    }
}

TEST(MoreauEnvelope, GradientExamples) {
    EXPECT_LE((moreau_envelope_grad(kPsd3, 1.0, diag({2, 0, -3})) - diag({0, 0, -3})).norm(), 1e-15);
    Rng rng(24);
    const Matrix p = rng.normal_matrix(3, 3);
    const Matrix w = p * p.transpose();
    EXPECT_LE(moreau_envelope_grad(kPsd3, 1.0, w).norm(), 1e-12 * (1.0 + w.norm()));
}

TEST(MoreauEnvelope, GradientMatchesFiniteDifferences) {
    Rng rng(25);
    for (const auto& g : kinds()) {
        for (double sigma : {0.5, 2.0}) {
            for (int t = 0; t < 20; ++t) {
                const Matrix w = 2.0 * random_input(rng, g);
                const Matrix d = random_input(rng, g);
                const double h = 1e-6;
                const double fd = (moreau_envelope(g, sigma, w + h * d) - moreau_envelope(g, sigma, w - h * d)) / (2 * h);
                const double exact = moreau_envelope_grad(g, sigma, w).cwiseProduct(d).sum();
                EXPECT_LE(std::abs(fd - exact), 1e-5 * std::max(1.0, std::abs(exact)));
            }
        }
    }
}

TEST(SubgradientCheck, Examples) {
    EXPECT_TRUE(subgradient_check(kPsd3, diag({2, 0, 0}), diag({0, 0, -3})).valid);
    EXPECT_TRUE(subgradient_check(kNuc22, diag({2, 0}), diag({1, 0.5})).valid);
    const SubgradientPair bad = subgradient_check(kNuc22, diag({2, 0}), diag({1, 2}));
    EXPECT_FALSE(bad.valid);
    EXPECT_NEAR(bad.residual, 1.0, 1e-12);
}

TEST(MakeFrame, PsdPartition) {
    const SpectralFrame f = make_frame(kPsd3, diag({2, 0, 0}), diag({0, 0, -3}));
    EXPECT_EQ(f.upper, std::vector<int>{0});
    EXPECT_EQ(f.boundary, std::vector<int>{1});
    EXPECT_EQ(f.lower, std::vector<int>{2});
    EXPECT_FALSE(f.band_active);
}

TEST(MakeFrame, NuclearPartition) {
    SpectralFrame f = make_frame(kNuc22, diag({2, 0}), diag({1, 0.5}));
    EXPECT_EQ(f.upper, std::vector<int>{0});
    EXPECT_TRUE(f.boundary.empty());
    EXPECT_EQ(f.lower, std::vector<int>{1});

    const auto g23 = StructuredConvexFunction::nuclear_norm(2, 3);
    const Matrix a = mat({{3, 0, 0}, {0, 1, 0}});
    const SubgradientPair pair = split_point(g23, a);
    f = make_frame(g23, pair.x, pair.u);
    EXPECT_EQ(f.upper, std::vector<int>{0});
    EXPECT_EQ(f.boundary, std::vector<int>{1});
    EXPECT_TRUE(f.lower.empty());
}

TEST(MakeFrame, RejectsInvalidPairWithResidual) {
    try {
        make_frame(kNuc22, diag({2, 0}), diag({1, 2}));
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("1.000e+00"), std::string::npos) << e.what();
    }
}

TEST(MakeFrame, BandFlag) {
    const auto g = StructuredConvexFunction::psd_indicator(2);
    const SpectralFrame f = frame_at(g, diag({1, 1e-12}));
    EXPECT_EQ(f.boundary, std::vector<int>{1});
    EXPECT_TRUE(f.band_active);
}

TEST(MakeFrame, RandomDecompositions) {
    Rng rng(26);
    for (int t = 0; t < 1000; ++t) {
        const bool psd = t % 2 == 0;
        const int p = 1 + static_cast<int>(rng.index(4));
        const int q = p + static_cast<int>(rng.index(2));
        const auto g = psd ? StructuredConvexFunction::psd_indicator(p) : StructuredConvexFunction::nuclear_norm(p, q);
        const Matrix a = 2.0 * random_input(rng, g);
        const SpectralFrame f = frame_at(g, a);
        Matrix core = Matrix::Zero(g.rows(), g.cols());
        for (int i = 0; i < f.values.size(); ++i) core(i, i) = f.values(i);
        EXPECT_LE((f.left * core * f.right.transpose() - a).norm(), 1e-10 * (1.0 + a.norm()));
        EXPECT_EQ(f.upper.size() + f.boundary.size() + f.lower.size(), static_cast<std::size_t>(f.values.size()));
    }
}
