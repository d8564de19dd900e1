#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "tdacpd/series.hpp"

using namespace tdacpd;

TEST(TimeSeries, RejectsInvalidConstruction) {
    EXPECT_THROW(TimeSeries({}, 1), InvalidInput);
    EXPECT_THROW(TimeSeries({1, 2, 3}, 2), InvalidInput);
    EXPECT_THROW(TimeSeries({1, 2}, 0), InvalidInput);
    EXPECT_THROW(TimeSeries::univariate({1, std::numeric_limits<double>::quiet_NaN()}), InvalidInput);
    EXPECT_THROW(TimeSeries::univariate({1, std::numeric_limits<double>::infinity()}), InvalidInput);
    EXPECT_THROW(TimeSeries::from_points({{1, 2}, {3}}), InvalidInput);
}

TEST(TimeSeries, Accessors) {
    const auto s = TimeSeries::from_points({{1, 2}, {3, 4}, {5, 6}});
    EXPECT_EQ(s.length(), 3u);
    EXPECT_EQ(s.dim(), 2u);
    EXPECT_FALSE(s.is_univariate());
    EXPECT_EQ(s.at(1, 1), 4.0);
    EXPECT_EQ(s.point(2)[0], 5.0);
    EXPECT_EQ(s.column(1), (std::vector<double>{2, 4, 6}));
    EXPECT_EQ(s.slice(1, 2), TimeSeries::from_points({{3, 4}, {5, 6}}));
}

TEST(Normalize, MapsEachCoordinateOntoUnitInterval) {
    const auto s = TimeSeries::from_points({{1, 10}, {3, 10}, {2, 10}});
    const auto n = normalize(s);
    EXPECT_DOUBLE_EQ(n.at(0, 0), -0.5);
    EXPECT_DOUBLE_EQ(n.at(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(n.at(2, 0), 0.0);
    for (std::size_t t = 0; t < 3; ++t) {
        EXPECT_EQ(n.at(t, 1), 0.0);   // constant coordinate
    }
}

TEST(Normalize, IdempotentAndShiftInvariant) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v(60);
        for (auto& x : v) x = g(rng);
        const auto s = TimeSeries(v, 2);
        const auto once = normalize(s);
        const auto twice = normalize(once);
        const double c = 100.0 * g(rng);
        std::vector<double> shifted(v);
        for (auto& x : shifted) x += c;
        const auto moved = normalize(TimeSeries(shifted, 2));
        for (std::size_t i = 0; i < v.size(); ++i) {
            EXPECT_NEAR(once.data()[i], twice.data()[i], 1e-12);
            EXPECT_NEAR(once.data()[i], moved.data()[i], 1e-10);
            EXPECT_GE(once.data()[i], -0.5);
            EXPECT_LE(once.data()[i], 0.5);
        }
    }
}

TEST(SlidingWindows, CountsAndOrigins) {
    const auto s = TimeSeries::univariate({1, 2, 3, 4, 5, 6});
    const auto clouds = sliding_windows(s, WindowConfig{4});
    ASSERT_EQ(clouds.size(), 3u);
    for (std::size_t i = 0; i < clouds.size(); ++i) {
        EXPECT_EQ(clouds[i].origin_index(), i + 1);
        EXPECT_EQ(clouds[i].size(), 4u);
        EXPECT_EQ(clouds[i].point(0)[0], static_cast<double>(i + 1));
    }
    EXPECT_EQ(sliding_windows(s, WindowConfig{6}).size(), 1u);
}

TEST(SlidingWindows, MultivariatePointsStayTogether) {
    const auto s = TimeSeries::from_points({{1, 10}, {2, 20}, {3, 30}});
    const auto clouds = sliding_windows(s, WindowConfig{2});
    ASSERT_EQ(clouds.size(), 2u);
    EXPECT_EQ(clouds[1].dim(), 2u);
    EXPECT_EQ(clouds[1].point(1)[1], 30.0);
}

TEST(SlidingWindows, RejectsBadWindows) {
    const auto s = TimeSeries::univariate({1, 2, 3});
    EXPECT_THROW(sliding_windows(s, WindowConfig{1}), InvalidWindow);
    EXPECT_THROW(sliding_windows(s, WindowConfig{4}), InvalidWindow);
    EXPECT_THROW(sliding_windows(s, WindowConfig{0}), InvalidInput);
}
