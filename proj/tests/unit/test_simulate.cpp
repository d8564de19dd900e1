#include <cmath>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "tdacpd/random.hpp"
#include "tdacpd/simulate.hpp"

using namespace tdacpd;

namespace {

struct Moments {
    double mean, var, se_mean, se_var;
};

Moments moments(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = (v - m) * (v - m);
        m2 += d;
        m4 += d * d;
    }
    const double var = m2 / (n - 1.0);
    // Standard error of the sample variance from the fourth central moment.
    return {m, var, std::sqrt(var / n), std::sqrt((m4 / n - var * var) / n)};
}

ScenarioSpec single(Distribution d, std::size_t n = 100000) {
    return ScenarioSpec{"single", n, {}, {std::move(d)}, ScaleNotation::std_dev, std::nullopt};
}

} // namespace

TEST(Generate, SameSeedSameSeries) {
    const auto spec = scenarios::mvnormal_to_mvt(200, 100);
    EXPECT_EQ(generate(spec, 5), generate(spec, 5));
    EXPECT_FALSE(generate(spec, 5) == generate(spec, 6));
}

TEST(Generate, PoissonAdjustedMoments) {
    const auto x = generate(single(PoissonAdjusted{2.0}), 1);
    const auto m = moments(x.data());
    EXPECT_NEAR(m.mean, 0.0, 3 * m.se_mean);
    EXPECT_NEAR(m.var, 2.0, 3 * m.se_var);
}

TEST(Generate, LaplaceVariance) {
    const auto x = generate(single(Laplace{std::sqrt(0.5)}), 2);
    const auto m = moments(x.data());
    EXPECT_NEAR(m.var, 1.0, 3 * m.se_var);
    EXPECT_NEAR(m.mean, 0.0, 3 * m.se_mean);
}

TEST(Generate, StudentTVariance) {
    // t(4) has an infinite fourth moment, so the plug-in standard error is
    // unreliable; a 5% band is wide enough at this sample size.
    const auto x = generate(single(StudentT{4.0}), 3);
    const auto m = moments(x.data());
    EXPECT_NEAR(m.var, 2.0, 0.1);
}

TEST(Generate, NormalScaleNotation) {
    auto spec = single(Normal{1.0, 4.0});
    auto m = moments(generate(spec, 4).data());
    EXPECT_NEAR(m.var, 16.0, 3 * m.se_var);
    spec.normal_notation = ScaleNotation::variance;
    m = moments(generate(spec, 4).data());
    EXPECT_NEAR(m.var, 4.0, 3 * m.se_var);
    EXPECT_NEAR(m.mean, 1.0, 3 * m.se_mean);
}

TEST(Generate, MvNormalCovariance) {
    const auto x = generate(single(MvNormal{{1, 2, 3}, scenarios::equicorrelated3()}, 50000), 5);
    double c01 = 0.0, v0 = 0.0;
    double m0 = 0, m1 = 0;
    for (std::size_t t = 0; t < x.length(); ++t) {
        m0 += x.at(t, 0);
        m1 += x.at(t, 1);
    }
    m0 /= static_cast<double>(x.length());
    m1 /= static_cast<double>(x.length());
    for (std::size_t t = 0; t < x.length(); ++t) {
        c01 += (x.at(t, 0) - m0) * (x.at(t, 1) - m1);
        v0 += (x.at(t, 0) - m0) * (x.at(t, 0) - m0);
    }
    EXPECT_NEAR(m0, 1.0, 0.03);
    EXPECT_NEAR(m1, 2.0, 0.03);
    EXPECT_NEAR(c01 / v0, 0.9, 0.02);
}

TEST(Generate, StepBoundaryIsExact) {
    const auto x = generate(scenarios::step(50, 21, 0.0, 1.0), 0);
    for (std::size_t t = 0; t < 50; ++t) {
        EXPECT_EQ(x.at(t, 0), t + 1 >= 21 ? 1.0 : 0.0);
    }
}

TEST(Generate, ArmaFollowsRecurrence) {
    const auto spec = scenarios::arma_error_variance(300, 150, ScaleNotation::variance);
    const auto x = generate(spec, 9);
    EXPECT_EQ(x.length(), 300u);
    // Lag-1 autocorrelation of ARMA(1,1) with ar 0.4, ma 0.5 is about 0.64.
    double m = 0.0;
    for (double v : x.data()) m += v;
    m /= 300.0;
    double g0 = 0.0, g1 = 0.0;
    for (std::size_t t = 0; t < 300; ++t) {
        g0 += (x.at(t, 0) - m) * (x.at(t, 0) - m);
        if (t) g1 += (x.at(t, 0) - m) * (x.at(t - 1, 0) - m);
    }
    EXPECT_GT(g1 / g0, 0.4);
}

TEST(Generate, InvalidSpecs) {
    EXPECT_THROW(generate(single(MvNormal{{0, 0}, {1, 2, 2, 1}}), 0), InvalidSpec);   // not PD
    EXPECT_THROW(generate(single(MvNormal{{0, 0}, {1, 0.5, 0.4, 1}}), 0), InvalidSpec); // asymmetric
    ScenarioSpec bad{"bad", 10, {5}, {Normal{}}, ScaleNotation::std_dev, std::nullopt};
    EXPECT_THROW(bad.validate(), InvalidSpec);
    bad.segments.push_back(MvNormal{{0, 0}, {1, 0, 0, 1}});
    EXPECT_THROW(bad.validate(), InvalidSpec);
    ScenarioSpec late{"late", 10, {11}, {Normal{}, Normal{}}, ScaleNotation::std_dev, std::nullopt};
    EXPECT_THROW(late.validate(), InvalidSpec);
    EXPECT_THROW(generate(single(StudentT{0.0}), 0), InvalidSpec);
}

TEST(ChildSeeds, DistinctSeriesAcrossReplications) {
    const auto spec = scenarios::normal_variance(200, 100, ScaleNotation::variance);
    std::set<std::size_t> hashes;
    std::set<std::uint64_t> seeds;
    for (std::uint64_t r = 0; r < 1000; ++r) {
        const auto s = child_seed(12345, r);
        seeds.insert(s);
        const auto x = generate(spec, s);
        std::string bytes(reinterpret_cast<const char*>(x.data().data()), x.data().size() * sizeof(double));
        hashes.insert(std::hash<std::string>{}(bytes));
    }
    EXPECT_EQ(seeds.size(), 1000u);
    EXPECT_EQ(hashes.size(), 1000u);
}
