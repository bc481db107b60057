#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "foldtrace/spectral.hpp"

using namespace foldtrace;

namespace {

Eigen::VectorXd sample(const SpectralGrid& g, double (*f)(double), double k) {
    Eigen::VectorXd v(g.m());
    for (int i = 0; i < g.m(); ++i) v[i] = f(k * g.nodes()[i]);
    return v;
}

double neg_sin(double t) { return -std::sin(t); }
double neg_cos(double t) { return -std::cos(t); }
double sin_(double t) { return std::sin(t); }
double cos_(double t) { return std::cos(t); }

// Closed-form first-derivative matrix for even m: 0.5 (-1)^(j-l) cot((j-l) h / 2).
Eigen::MatrixXd cotangent_d1(int m) {
    const double h = 2.0 * std::numbers::pi / m;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        for (int l = 0; l < m; ++l) {
            if (j == l) continue;
            const int s = j - l;
            d(j, l) = 0.5 * ((s % 2 == 0) ? 1.0 : -1.0) / std::tan(s * h / 2.0);
        }
    }
    return d;
}

}  // namespace

TEST(FourierDiff, FirstDerivativeOfSin3) {
    const SpectralGrid g(32);
    const Eigen::VectorXd err = g.d1() * sample(g, sin_, 3) - 3.0 * sample(g, cos_, 3);
    EXPECT_LT(err.lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(FourierDiff, ThirdDerivativeOfCos2) {
    const SpectralGrid g(32);
    const Eigen::VectorXd err = g.d3() * sample(g, cos_, 2) - 8.0 * sample(g, sin_, 2);
    EXPECT_LT(err.lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(FourierDiff, ConstantsAreAnnihilated) {
    const SpectralGrid g(32);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(32);
    EXPECT_LT((g.d1() * one).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LT((g.d3() * one).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(FourierDiff, MatchesCotangentFormula) {
    for (int m : {8, 16, 64, 128}) {
        EXPECT_LT((fourier_diff_matrix(m, 1) - cotangent_d1(m)).lpNorm<Eigen::Infinity>(), 1e-11 * m) << m;
    }
}

TEST(FourierDiff, ThirdOrderEqualsCubedFirstOrderForEvenGrids) {
    // Both drop the Nyquist mode, so they agree as matrices.
    const Eigen::MatrixXd d1 = cotangent_d1(32);
    const Eigen::MatrixXd diff = fourier_diff_matrix(32, 3) - d1 * d1 * d1;
    EXPECT_LT(diff.lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(FourierDiff, RejectsInvalidGrids) {
    EXPECT_THROW(fourier_diff_matrix(7, 1), std::invalid_argument);
    EXPECT_THROW(fourier_diff_matrix(6, 1), std::invalid_argument);
    EXPECT_THROW(fourier_diff_matrix(33, 3), std::invalid_argument);
    EXPECT_THROW(fourier_diff_matrix(32, 0), std::invalid_argument);
    EXPECT_THROW(SpectralGrid(9), std::invalid_argument);
}

TEST(FourierDiffProperty, ExactOnAllResolvedModes) {
    for (int m : {8, 32, 64, 128}) {
        const SpectralGrid g(m);
        for (int k = 1; k < m / 2; ++k) {
            const double kk = k;
            const Eigen::VectorXd s = sample(g, sin_, kk);
            const Eigen::VectorXd c = sample(g, cos_, kk);
            // Third derivatives grow like k^3, so the bound is relative to that scale.
            const double scale3 = std::max(1.0, kk * kk * kk);
            EXPECT_LT((g.d1() * s - kk * c).lpNorm<Eigen::Infinity>(), 1e-9 * std::max(1.0, kk)) << m << ' ' << k;
            EXPECT_LT((g.d1() * c + kk * s).lpNorm<Eigen::Infinity>(), 1e-9 * std::max(1.0, kk)) << m << ' ' << k;
            EXPECT_LT((g.d3() * s - kk * kk * kk * sample(g, neg_cos, kk)).lpNorm<Eigen::Infinity>(), 1e-9 * scale3)
                << m << ' ' << k;
            EXPECT_LT((g.d3() * c - kk * kk * kk * sample(g, sin_, kk)).lpNorm<Eigen::Infinity>(), 1e-9 * scale3)
                << m << ' ' << k;
        }
    }
}

TEST(FourierDiffProperty, SmallGridModesToAbsoluteTolerance) {
    const SpectralGrid g(32);
    for (int k = 0; k <= 10; ++k) {
        const double kk = k;
        const Eigen::VectorXd s = sample(g, sin_, kk);
        const Eigen::VectorXd c = sample(g, cos_, kk);
        EXPECT_LT((g.d1() * s - kk * c).lpNorm<Eigen::Infinity>(), 1e-9);
        EXPECT_LT((g.d1() * c - kk * sample(g, neg_sin, kk)).lpNorm<Eigen::Infinity>(), 1e-9);
        EXPECT_LT((g.d3() * s - kk * kk * kk * sample(g, neg_cos, kk)).lpNorm<Eigen::Infinity>(), 1e-9);
        EXPECT_LT((g.d3() * c - kk * kk * kk * sample(g, sin_, kk)).lpNorm<Eigen::Infinity>(), 1e-9);
    }
}

TEST(FourierDiffProperty, StructuralInvariants) {
    for (int m : {8, 32, 128}) {
        const SpectralGrid g(m);
        EXPECT_LT((g.d1() + g.d1().transpose()).lpNorm<Eigen::Infinity>(), 1e-10);
        EXPECT_LT(g.d1().rowwise().sum().lpNorm<Eigen::Infinity>(), 1e-10);
        EXPECT_LT(g.d3().rowwise().sum().lpNorm<Eigen::Infinity>(), 1e-10 * m * m);
        EXPECT_LT((g.d1_plus_d3() - g.d1() - g.d3()).lpNorm<Eigen::Infinity>(), 1e-12 * m * m);
    }
}

TEST(SpectralGrid, NodesAndQuadrature) {
    const SpectralGrid g(16);
    EXPECT_EQ(g.m(), 16);
    EXPECT_DOUBLE_EQ(g.nodes()[4], std::numbers::pi / 2.0);
    EXPECT_DOUBLE_EQ(g.weight(), 2.0 * std::numbers::pi / 16.0);
    EXPECT_NEAR(g.integrate(g.cos_nodes()), 0.0, 1e-14);
    EXPECT_NEAR(g.integrate(Eigen::VectorXd::Ones(16)), 2.0 * std::numbers::pi, 1e-14);
}
