#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tdacpd/prewhiten.hpp"

using namespace tdacpd;

namespace {

std::vector<double> ar_series(const std::vector<double>& phi, std::size_t n, std::uint64_t seed,
                              double mean = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> y(n + 200, 0.0);
    for (std::size_t t = phi.size(); t < y.size(); ++t) {
        double v = g(rng);
        for (std::size_t j = 0; j < phi.size(); ++j) v += phi[j] * y[t - j - 1];
        y[t] = v;
    }
    std::vector<double> out(y.end() - static_cast<long>(n), y.end());
    for (auto& v : out) v += mean;
    return out;
}

double lag1_autocorrelation(std::span<const double> e) {
    const auto gamma = autocovariance(e, 1);
    return gamma[1] / gamma[0];
}

} // namespace

TEST(Autocovariance, BiasedEstimator) {
    const std::vector<double> y{1, 2, 3, 4};
    const auto g = autocovariance(y, 2);
    EXPECT_DOUBLE_EQ(g[0], 1.25);
    EXPECT_DOUBLE_EQ(g[1], (-1.5 * -0.5 + -0.5 * 0.5 + 0.5 * 1.5) / 4.0);
    EXPECT_THROW(autocovariance(y, 4), InvalidInput);
}

TEST(FitAr, RecoversAr1Coefficient) {
    const auto y = ar_series({0.6}, 5000, 2024, 3.0);
    const auto s = TimeSeries::univariate(y);
    const auto model = fit_ar(s, 1);
    EXPECT_GE(model.coefficients[0], 0.55);
    EXPECT_LE(model.coefficients[0], 0.65);
    EXPECT_NEAR(model.intercept, 3.0, 0.2);
    const auto res = ar_residuals(s, model);
    EXPECT_EQ(res.offset, 1u);
    EXPECT_EQ(res.series.length(), 4999u);
    EXPECT_LT(std::abs(lag1_autocorrelation(res.series.data())), 0.05);
}

TEST(FitAr, CloseToLeastSquaresOracle) {
    const auto y = ar_series({0.5, -0.3, 0.2}, 4000, 7);
    const auto model = fit_ar(TimeSeries::univariate(y), 3);
    const auto ls = oracle::ar_least_squares(y, 3);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(model.coefficients[j], ls[j], 0.01);
    }
    EXPECT_NEAR(model.noise_variance, 1.0, 0.1);
}

TEST(FitAr, OrderZeroIsDemeaning) {
    const auto s = TimeSeries::univariate({1, 3, 2, 6});
    const auto res = ar_residuals(s, fit_ar(s, 0));
    EXPECT_EQ(res.offset, 0u);
    EXPECT_DOUBLE_EQ(res.series.at(0, 0), -2.0);
}

TEST(FitAr, Errors) {
    EXPECT_THROW(fit_ar(TimeSeries::univariate(std::vector<double>(10, 2.0)), 2), FitError);
    EXPECT_THROW(fit_ar(TimeSeries::univariate({1, 2, 3}), 2), InvalidInput);
    EXPECT_THROW(fit_ar(TimeSeries::from_points({{1, 2}, {2, 1}, {0, 0}}), 1), Unsupported);
}

TEST(Difference, FirstAndHigherOrder) {
    const auto s = TimeSeries::univariate({1, 4, 9, 16, 25});
    const auto d1 = difference(s);
    EXPECT_EQ(d1.offset, 1u);
    EXPECT_EQ(d1.series, TimeSeries::univariate({3, 5, 7, 9}));
    const auto d2 = difference(s, 2);
    EXPECT_EQ(d2.offset, 2u);
    EXPECT_EQ(d2.series, TimeSeries::univariate({2, 2, 2}));
    EXPECT_EQ(difference(s, 0).series, s);
    EXPECT_THROW(difference(s, 5), InvalidInput);
}

TEST(Difference, Multivariate) {
    const auto s = TimeSeries::from_points({{1, 10}, {2, 30}, {4, 60}});
    EXPECT_EQ(difference(s).series, TimeSeries::from_points({{1, 20}, {2, 30}}));
}
