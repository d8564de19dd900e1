#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tdacpd/detection.hpp"
#include "tdacpd/error.hpp"
#include "tdacpd/random.hpp"
#include "tdacpd/series.hpp"

namespace tdacpd {

/// How the per-split null mean and standard deviation are obtained.
enum class CvmMoments {
    automatic,     // closed form for tie-free data, permutation otherwise
    closed_form,
    permutation,
};

struct CvmConfig {
    std::size_t min_segment = 30;
    CvmMoments moments = CvmMoments::automatic;
    std::size_t permutations = 500;
    std::uint64_t seed = 0;
};

struct NullMoments {
    double mean;
    double sd;
};

namespace detail {

/// Observations replaced by dense tie-group ids (0 = smallest value).
struct RankGroups {
    std::vector<std::size_t> group;   // per observation, in input order
    std::vector<std::size_t> sizes;   // observations per group
    bool has_ties = false;
};

inline RankGroups rank_groups(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    RankGroups r;
    r.group.resize(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || values[order[i]] != values[order[i - 1]]) {
            r.sizes.push_back(0);
        } else {
            r.has_ties = true;
        }
        r.group[order[i]] = r.sizes.size() - 1;
        ++r.sizes.back();
    }
    return r;
}

/// Two-sample CvM statistic for every prefix size a in [first_a, last_a], where
/// the prefix holds the first a entries of `groups` and the suffix the rest.
inline std::vector<double> prefix_cvm_statistics(std::span<const std::size_t> groups,
                                                 std::span<const std::size_t> sizes,
                                                 std::size_t first_a, std::size_t last_a) {
    const std::size_t n = groups.size();
    const std::size_t g = sizes.size();
    std::vector<std::size_t> left(g, 0);
    for (std::size_t i = 0; i < first_a; ++i) {
        ++left[groups[i]];
    }
    std::vector<double> out;
    out.reserve(last_a - first_a + 1);
    for (std::size_t a = first_a;; ++a) {
        const std::size_t b = n - a;
        const double da = static_cast<double>(a);
        const double db = static_cast<double>(b);
        std::size_t cx = 0, cy = 0;
        double sum = 0.0;
        for (std::size_t k = 0; k < g; ++k) {
            cx += left[k];
            cy += sizes[k] - left[k];
            const double diff = static_cast<double>(cx) / da - static_cast<double>(cy) / db;
            sum += static_cast<double>(sizes[k]) * diff * diff;
        }
        const double total = da + db;
        out.push_back(da * db / (total * total) * sum);
        if (a == last_a) {
            break;
        }
        ++left[groups[a]];
    }
    return out;
}

} // namespace detail

/// Two-sample Cramer-von Mises statistic
/// ab/(a+b)^2 * sum over the pooled sample of (F_a(z) - G_b(z))^2.
inline double cvm_two_sample(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) {
        throw InvalidInput("Cramer-von Mises needs two nonempty samples");
    }
    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const auto ranks = detail::rank_groups(pooled);
    return detail::prefix_cvm_statistics(ranks.group, ranks.sizes, x.size(), x.size()).front();
}

/// Null mean and standard deviation of the statistic for continuous data
/// with sample sizes a and b.
inline NullMoments cvm_null_moments(std::size_t a, std::size_t b) {
    if (a == 0 || b == 0) {
        throw InvalidInput("null moments need positive sample sizes");
    }
    const double m = static_cast<double>(a);
    const double n = static_cast<double>(b);
    const double total = m + n;
    const double mean = 1.0 / 6.0 + 1.0 / (6.0 * total);
    const double var = (1.0 / 45.0) * ((total + 1.0) / (total * total)) *
                       (4.0 * m * n * total - 3.0 * (m * m + n * n) - 2.0 * m * n) / (4.0 * m * n);
    return NullMoments{mean, std::sqrt(std::max(var, 0.0))};
}

/// Permutation estimates of the null moments for every prefix size in
/// [first_a, last_a], shuffling the pooled sample `values`.
inline std::vector<NullMoments> cvm_permutation_moments(std::span<const double> values,
                                                        std::size_t first_a, std::size_t last_a,
                                                        std::size_t permutations, Rng& rng) {
    if (first_a == 0 || last_a >= values.size() || first_a > last_a) {
        throw InvalidInput("invalid prefix range for permutation moments");
    }
    if (permutations < 2) {
        throw InvalidInput("permutation moments need at least 2 permutations");
    }
    const auto ranks = detail::rank_groups(values);
    std::vector<std::size_t> shuffled = ranks.group;
    const std::size_t count = last_a - first_a + 1;
    std::vector<double> mean(count, 0.0), m2(count, 0.0);
    for (std::size_t r = 0; r < permutations; ++r) {
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto stats = detail::prefix_cvm_statistics(shuffled, ranks.sizes, first_a, last_a);
        const double k = static_cast<double>(r + 1);
        for (std::size_t i = 0; i < count; ++i) {
            const double delta = stats[i] - mean[i];
            mean[i] += delta / k;
            m2[i] += delta * (stats[i] - mean[i]);
        }
    }
    std::vector<NullMoments> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = NullMoments{mean[i],
                             std::sqrt(m2[i] / static_cast<double>(permutations - 1))};
    }
    return out;
}

/// Single change point by the maximal standardized CvM statistic over all
/// admissible splits. Rank based, so invariant under increasing transforms.
inline DetectionResult cvm_single_change(const TimeSeries& series, const CvmConfig& cfg) {
    if (!series.is_univariate()) {
        throw Unsupported("CvM CPM does not support multivariate time series");
    }
    const auto range = admissible_splits(series.length(), cfg.min_segment);
    const auto values = series.data();
    const auto ranks = detail::rank_groups(values);
    // Prefix size a corresponds to change point a + 1.
    const std::size_t first_a = range.first - 1;
    const std::size_t last_a = range.last - 1;
    const auto stats = detail::prefix_cvm_statistics(ranks.group, ranks.sizes, first_a, last_a);

    DetectionResult result;
    result.detector = Detector::cvm;
    bool closed = cfg.moments == CvmMoments::closed_form ||
                  (cfg.moments == CvmMoments::automatic && !ranks.has_ties);
    std::vector<NullMoments> moments;
    if (closed) {
        for (std::size_t a = first_a; a <= last_a; ++a) {
            moments.push_back(cvm_null_moments(a, values.size() - a));
        }
    } else {
        auto rng = make_rng(cfg.seed);
        moments = cvm_permutation_moments(values, first_a, last_a, cfg.permutations, rng);
        if (cfg.moments == CvmMoments::automatic) {
            result.warnings.push_back("tied observations: null moments estimated from " +
                                      std::to_string(cfg.permutations) + " permutations");
        }
    }

    std::size_t best = 0;
    double best_d = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double d = moments[i].sd > 0.0 ? (stats[i] - moments[i].mean) / moments[i].sd : 0.0;
        if (i == 0 || d > best_d) {
            best = i;
            best_d = d;
        }
    }
    result.change_points.push_back(range.first + best);
    result.statistics.push_back(best_d);
    return result;
}

inline DetectionResult cvm_single_change(const TimeSeries& series, std::size_t min_segment) {
    CvmConfig cfg;
    cfg.min_segment = min_segment;
    return cvm_single_change(series, cfg);
}

} // namespace tdacpd
