#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "tdacpd/detection.hpp"
#include "tdacpd/error.hpp"
#include "tdacpd/series.hpp"

namespace tdacpd {

namespace detail {

inline double sum_of_squares(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) {
        mean += v;
    }
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    return ss;
}

} // namespace detail

/// Two-group Bartlett statistic for equal variances; empty when either group
/// has zero sample variance (the statistic is undefined there).
inline std::optional<double> bartlett_statistic(std::span<const double> x,
                                                std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) {
        throw InvalidInput("Bartlett's test needs at least 2 observations per group");
    }
    const double n1 = static_cast<double>(x.size() - 1);
    const double n2 = static_cast<double>(y.size() - 1);
    const double ss1 = detail::sum_of_squares(x);
    const double ss2 = detail::sum_of_squares(y);
    if (!(ss1 > 0.0) || !(ss2 > 0.0)) {
        return std::nullopt;
    }
    const double pooled = std::log((ss1 + ss2) / (n1 + n2));
    // (N-2) ln Sp^2 - sum (n_i-1) ln S_i^2, grouped so equal variances give exactly 0.
    const double numer = n1 * (pooled - std::log(ss1 / n1)) + n2 * (pooled - std::log(ss2 / n2));
    const double correction = 1.0 + (1.0 / n1 + 1.0 / n2 - 1.0 / (n1 + n2)) / 3.0;
    return numer / correction;
}

/// Single change in variance by the maximal Bartlett statistic over the
/// admissible splits. Splits where a side has zero variance are skipped.
inline DetectionResult bartlett_single_change(const TimeSeries& series, std::size_t min_segment) {
    if (!series.is_univariate()) {
        throw Unsupported("Bartlett's test does not support multivariate time series");
    }
    const auto range = admissible_splits(series.length(), std::max<std::size_t>(min_segment, 2));
    const auto values = series.data();

    DetectionResult result;
    result.detector = Detector::bartlett;
    std::size_t skipped = 0;
    std::optional<std::size_t> best;
    double best_stat = 0.0;
    for (std::size_t tau = range.first; tau <= range.last; ++tau) {
        const std::size_t a = tau - 1;
        const auto stat = bartlett_statistic(values.first(a), values.subspan(a));
        if (!stat) {
            ++skipped;
            continue;
        }
        if (!best || *stat > best_stat) {
            best = tau;
            best_stat = *stat;
        }
    }
    if (skipped > 0) {
        result.warnings.push_back(std::to_string(skipped) +
                                  " split(s) skipped: zero variance in a segment");
    }
    if (!best) {
        throw InvalidInput("Bartlett statistic undefined at every admissible split");
    }
    result.change_points.push_back(*best);
    result.statistics.push_back(best_stat);
    return result;
}

} // namespace tdacpd
