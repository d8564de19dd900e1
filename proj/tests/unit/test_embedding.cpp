#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tdacpd/embedding.hpp"

using namespace tdacpd;

TEST(Pca, MatchesJacobiOracleOnIntegerMatrix) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> cell(0, 20);
    const int rows = 100, cols = 50;
    Eigen::MatrixXd x(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) x(i, j) = cell(rng);

    // Oracle: covariance by loops, Jacobi eigenvectors, scores by loops.
    std::vector<double> mean(cols, 0.0);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) mean[j] += x(i, j);
        mean[j] /= rows;
    }
    std::vector<std::vector<double>> cov(cols, std::vector<double>(cols, 0.0));
    for (int a = 0; a < cols; ++a)
        for (int b = 0; b < cols; ++b) {
            for (int i = 0; i < rows; ++i) cov[a][b] += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
            cov[a][b] /= rows - 1;
        }
    const auto [vals, vecs] = oracle::jacobi_eigen(cov);

    const auto model = pca_fit(x, 3);
    const Eigen::MatrixXd scores = pca_scores(model, x);
    for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(model.explained_variance(c), vals[c], 1e-8 * vals[0]);
        // Align the oracle's arbitrary sign with the library's.
        double dot = 0.0;
        for (int j = 0; j < cols; ++j) dot += vecs[j][c] * model.components(j, c);
        const double sign = dot < 0 ? -1.0 : 1.0;
        for (int i = 0; i < rows; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols; ++j) s += (x(i, j) - mean[j]) * vecs[j][c];
            EXPECT_NEAR(scores(i, c), sign * s, 1e-6);
        }
    }
}

TEST(Pca, ComponentsAreOrthonormalAndSignNormalized) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    Eigen::MatrixXd x(80, 6);
    for (int i = 0; i < 80; ++i)
        for (int j = 0; j < 6; ++j) x(i, j) = g(rng) * (j + 1);
    const auto model = pca_fit(x, 4);
    const Eigen::MatrixXd gram = model.components.transpose() * model.components;
    EXPECT_TRUE(gram.isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-10));
    for (int c = 0; c < 4; ++c) {
        Eigen::Index arg;
        model.components.col(c).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(model.components(arg, c), 0.0);
        if (c > 0) {
            EXPECT_LE(model.explained_variance(c), model.explained_variance(c - 1));
        }
    }
}

TEST(Pca, FullRankReconstruction) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd x(30, 8);
        for (int i = 0; i < 30; ++i)
            for (int j = 0; j < 8; ++j) x(i, j) = g(rng);
        const auto model = pca_fit(x, 8);
        EXPECT_FALSE(model.rank_deficient);
        const Eigen::MatrixXd scores = pca_scores(model, x);
        for (int i = 0; i < 30; ++i) {
            const Eigen::VectorXd back = model.reconstruct(scores.row(i).transpose());
            EXPECT_LE((back - x.row(i).transpose()).cwiseAbs().maxCoeff(), 1e-8);
        }
    }
}

TEST(Pca, RankDeficiencyIsFlagged) {
    Eigen::MatrixXd x(10, 4);
    for (int i = 0; i < 10; ++i) {
        x(i, 0) = i;
        x(i, 1) = 2.0 * i;
        x(i, 2) = 5.0;
        x(i, 3) = -i;
    }
    const auto model = pca_fit(x, 3);
    EXPECT_EQ(model.rank, 1u);
    EXPECT_TRUE(model.rank_deficient);
    EXPECT_EQ(model.explained_variance(1), 0.0);
}

TEST(Pca, RejectsBadDimensions) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 3);
    EXPECT_THROW(pca_fit(x, 0), InvalidInput);
    EXPECT_THROW(pca_fit(x, 4), InvalidInput);
    EXPECT_THROW(pca_fit(Eigen::MatrixXd(0, 3), 1), InvalidInput);
    const auto model = pca_fit(x, 2);
    EXPECT_THROW(pca_scores(model, Eigen::MatrixXd::Zero(2, 4)), InvalidInput);
}

TEST(TdaTransform, ShapeAndProvenance) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<double> v(120);
    for (auto& x : v) x = g(rng);
    const auto d = tda_transform(TimeSeries::univariate(v), 10, ScaleGrid::standard(), 3);
    EXPECT_EQ(d.values.length(), 111u);
    EXPECT_EQ(d.values.dim(), 3u);
    EXPECT_EQ(d.window, 10u);
    EXPECT_EQ(d.grid.size(), 50u);
}

TEST(TdaTransform, TranslationInvariant) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> shift(-1e3, 1e3);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t dim = rep % 2 ? 3 : 1;
        std::vector<double> v(80 * dim);
        for (auto& x : v) x = g(rng);
        std::vector<double> moved(v);
        const double c = shift(rng);
        for (auto& x : moved) x += c;
        const auto a = tda_transform(TimeSeries(v, dim), 8, ScaleGrid::standard(), 3);
        const auto b = tda_transform(TimeSeries(moved, dim), 8, ScaleGrid::standard(), 3);
        ASSERT_EQ(a.values.data().size(), b.values.data().size());
        for (std::size_t i = 0; i < a.values.data().size(); ++i) {
            ASSERT_NEAR(a.values.data()[i], b.values.data()[i], 1e-10);
        }
    }
}
