#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tdacpd/energy.hpp"

using namespace tdacpd;

namespace {

TimeSeries to_series(const oracle::Points& pts) { return TimeSeries::from_points(pts); }

oracle::Points slice(const oracle::Points& p, std::size_t a, std::size_t b) {
    return oracle::Points(p.begin() + static_cast<long>(a), p.begin() + static_cast<long>(b));
}

} // namespace

TEST(EnergyDivergence, MatchesBruteForceSums) {
    std::mt19937_64 rng(100);
    std::uniform_int_distribution<std::size_t> size(1, 40);
    std::uniform_real_distribution<double> alpha(0.2, 1.9);
    const std::size_t dims[] = {1, 2, 5};
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t d = dims[rep % 3];
        const auto x = oracle::random_points(rng, size(rng), d);
        auto y = oracle::random_points(rng, size(rng), d, 2.0);
        const double a = rep % 2 ? 1.0 : alpha(rng);
        const double got = energy_divergence(to_series(x), to_series(y), a);
        const double want = oracle::energy(x, y, a);
        ASSERT_NEAR(got, want, 1e-10 * std::max(1.0, std::abs(want))) << "case " << rep;
    }
}

TEST(EnergyDivergence, ExactlySymmetric) {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 50; ++rep) {
        const auto x = to_series(oracle::random_points(rng, 17, 3));
        const auto y = to_series(oracle::random_points(rng, 23, 3));
        EXPECT_EQ(energy_divergence(x, y), energy_divergence(y, x));
    }
}

TEST(EnergyDivergence, RejectsBadInput) {
    const auto a = TimeSeries::univariate({1, 2});
    const auto b = TimeSeries::from_points({{1, 2}});
    EXPECT_THROW(energy_divergence(a, b), InvalidInput);
    EXPECT_THROW(energy_divergence(a, a, 2.0), InvalidInput);
    EXPECT_THROW(energy_divergence(a, a, 0.0), InvalidInput);
}

TEST(BestSingleSplit, MatchesExhaustiveSearch) {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 30 + rep;
        const std::size_t ms = 3 + rep % 5;
        auto pts = oracle::random_points(rng, n, rep % 2 ? 1 : 2);
        for (std::size_t t = n / 2; t < n; ++t)
            for (auto& v : pts[t]) v *= 3.0;
        for (auto search : {SplitSearch::bounded, SplitSearch::suffix}) {
            EnergyConfig cfg;
            cfg.min_segment = ms;
            cfg.search = search;
            const auto got = best_single_split(to_series(pts), cfg);
            double best = -1e300;
            std::size_t best_tau = 0, best_end = 0;
            for (std::size_t tau = ms; tau + ms <= n; ++tau) {
                for (std::size_t end = tau + ms; end <= n; ++end) {
                    if (search == SplitSearch::suffix && end != n) continue;
                    const double q = oracle::energy(slice(pts, 0, tau), slice(pts, tau, end));
                    // Scanning tau then end ascending keeps the earliest among ties.
                    if (q > best + 1e-9) {
                        best = q;
                        best_tau = tau;
                        best_end = end;
                    }
                }
            }
            EXPECT_EQ(got.index, best_tau + 1);
            EXPECT_NEAR(got.statistic, best, 1e-8 * std::max(1.0, best));
            EXPECT_EQ(got.right_end, best_end);
        }
    }
}

TEST(BestSingleSplit, OnDemandDistancesMatchCachedTable) {
    std::mt19937_64 rng(5);
    const auto s = to_series(oracle::random_points(rng, 90, 2));
    EnergyConfig cached, lazy;
    lazy.cache_limit = 10;
    EXPECT_EQ(best_single_split(s, cached), best_single_split(s, lazy));
}

TEST(EDivisive, FindsTwoMeanShifts) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    std::vector<double> v(210);
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = g(rng) + (t >= 70 && t < 140 ? 10.0 : 0.0);
    EnergyConfig cfg;
    cfg.k = 2;
    const auto r = e_divisive(TimeSeries::univariate(v), cfg);
    EXPECT_EQ(r.change_points, (std::vector<std::size_t>{71, 141}));
    EXPECT_TRUE(std::is_sorted(r.change_points.begin(), r.change_points.end()));
    EXPECT_EQ(r.statistics.size(), 2u);
    EXPECT_TRUE(r.p_values.empty());
}

TEST(EDivisive, TwoSplitsAgreeWithExhaustiveTwoStepOracle) {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 5; ++rep) {
        oracle::Points pts;
        for (std::size_t t = 0; t < 60; ++t) pts.push_back({g(rng) * (t >= 20 && t < 40 ? 4.0 : 1.0)});
        EnergyConfig cfg;
        cfg.k = 2;
        cfg.min_segment = 5;
        const auto got = e_divisive(to_series(pts), cfg);

        // Oracle: best bounded split of a segment, then the better of the two halves.
        auto best_in = [&](std::size_t a, std::size_t b) {
            std::pair<double, std::size_t> best{-1e300, 0};
            for (std::size_t tau = a + 5; tau + 5 <= b; ++tau)
                for (std::size_t end = tau + 5; end <= b; ++end) {
                    const double q = oracle::energy(slice(pts, a, tau), slice(pts, tau, end));
                    if (q > best.first + 1e-9) best = {q, tau};
                }
            return best;
        };
        const auto first = best_in(0, 60);
        const auto left = best_in(0, first.second);
        const auto right = best_in(first.second, 60);
        std::size_t second = 0;
        if (left.second == 0) second = right.second;
        else if (right.second == 0) second = left.second;
        else second = right.first > left.first + 1e-9 ? right.second : left.second;
        std::vector<std::size_t> want{first.second + 1, second + 1};
        std::sort(want.begin(), want.end());
        EXPECT_EQ(got.change_points, want);
    }
}

TEST(EDivisive, InfeasibleConfigurations) {
    const auto s = TimeSeries::univariate(std::vector<double>(50, 1.0));
    EnergyConfig cfg;
    cfg.k = 2;
    cfg.min_segment = 20;
    EXPECT_THROW(e_divisive(s, cfg), InvalidInput);
    cfg.k = 0;
    EXPECT_THROW(e_divisive(s, cfg), InvalidInput);
    cfg.k = 1;
    cfg.min_segment = 1;
    EXPECT_THROW(e_divisive(s, cfg), InvalidInput);
}

TEST(EDivisive, PermutationTestIsDeterministicAndCalibrated) {
    std::mt19937_64 rng(123);
    std::normal_distribution<double> g;
    std::vector<double> p_values;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> v(60);
        for (auto& x : v) x = g(rng);
        EnergyConfig cfg;
        cfg.min_segment = 10;
        cfg.permutations = 199;
        cfg.seed = static_cast<std::uint64_t>(rep);
        const auto r = e_divisive(TimeSeries::univariate(v), cfg);
        ASSERT_EQ(r.p_values.size(), 1u);
        if (rep < 3) {
            EXPECT_EQ(r, e_divisive(TimeSeries::univariate(v), cfg));
        }
        p_values.push_back(r.p_values.front());
    }
    std::sort(p_values.begin(), p_values.end());
    const double median = 0.5 * (p_values[49] + p_values[50]);
    EXPECT_GE(median, 0.25);
    EXPECT_LE(median, 0.75);
}

TEST(EDivisive, StrongChangeHasSmallPValue) {
    std::vector<double> v(80);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = g(rng) + (t >= 40 ? 5.0 : 0.0);
    EnergyConfig cfg;
    cfg.permutations = 99;
    const auto r = e_divisive(TimeSeries::univariate(v), cfg);
    EXPECT_EQ(r.change_points.front(), 41u);
    EXPECT_LE(r.p_values.front(), 0.02);
}
