#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdacpd/detection.hpp"
#include "tdacpd/error.hpp"
#include "tdacpd/random.hpp"
#include "tdacpd/series.hpp"

namespace tdacpd {

/// Where the right-hand sample of a candidate split ends.
enum class SplitSearch {
    /// Right sample ends anywhere after tau (at least min_segment long); Q is
    /// maximized over (tau, kappa) jointly as in the E-Divisive procedure.
    bounded,
    /// Right sample is the whole remaining suffix.
    suffix,
};

struct EnergyConfig {
    double alpha = 1.0;
    SplitSearch search = SplitSearch::bounded;
    std::size_t min_segment = 30;
    std::size_t k = 1;
    /// Permutations per committed split for a p-value; 0 disables testing.
    std::size_t permutations = 0;
    std::uint64_t seed = 0;
    /// Series longer than this use on-the-fly distances instead of a T x T table.
    std::size_t cache_limit = 4096;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 2.0)) {
            throw InvalidInput("energy exponent alpha must lie in (0, 2)");
        }
        if (min_segment < 2) {
            throw InvalidInput("min_segment must be at least 2");
        }
        if (k < 1) {
            throw InvalidInput("number of change points k must be at least 1");
        }
    }
};

struct Split {
    std::size_t index;       // 1-based first index of the right segment
    double statistic;
    std::size_t right_end;   // 1-based last index of the right sample

    friend bool operator==(const Split&, const Split&) = default;
};

namespace detail {

inline double powered_distance(std::span<const double> a, std::span<const double> b,
                               double alpha) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    const double dist = std::sqrt(s);
    return alpha == 1.0 ? dist : std::pow(dist, alpha);
}

/// |y_i - y_j|^alpha for one series, either tabulated or computed on demand.
/// Both modes evaluate the same expression, so results are identical.
class DistanceTable {
public:
    DistanceTable(const TimeSeries& series, double alpha, std::size_t cache_limit)
        : series_(&series), alpha_(alpha), n_(series.length()) {
        if (n_ <= cache_limit) {
            table_.assign(n_ * n_, 0.0);
            for (std::size_t i = 0; i < n_; ++i) {
                for (std::size_t j = i + 1; j < n_; ++j) {
                    const double d = powered_distance(series.point(i), series.point(j), alpha_);
                    table_[i * n_ + j] = d;
                    table_[j * n_ + i] = d;
                }
            }
        }
    }

    double operator()(std::size_t i, std::size_t j) const {
        if (!table_.empty()) {
            return table_[i * n_ + j];
        }
        return i == j ? 0.0 : powered_distance(series_->point(i), series_->point(j), alpha_);
    }

    bool cached() const noexcept { return !table_.empty(); }

private:
    const TimeSeries* series_;
    double alpha_;
    std::size_t n_;
    std::vector<double> table_;
};

/// Q = mn/(m+n) * (2/(mn) sum_cross - within_left/C(m,2) - within_right/C(n,2)).
inline double scaled_energy(double cross, double within_left, double within_right,
                            std::size_t m, std::size_t n) {
    const double dm = static_cast<double>(m);
    const double dn = static_cast<double>(n);
    double e = 2.0 * cross / (dm * dn);
    if (m >= 2) {
        e -= within_left / (dm * (dm - 1.0) / 2.0);
    }
    if (n >= 2) {
        e -= within_right / (dn * (dn - 1.0) / 2.0);
    }
    return dm * dn / (dm + dn) * e;
}

struct LocalSplit {
    std::size_t offset;      // size of the left part
    std::size_t right_end;   // one past the last observation of the right part
    double statistic;
};

/// Best split of the observations `ids` (in order) into a left part
/// ids[0, tau) and a right part ids[tau, kappa). With SplitSearch::suffix
/// kappa is pinned to the end; otherwise it ranges over every admissible end.
///
/// Points join one at a time as the candidate right end. For each new end the
/// row of distances back to earlier points is prefix-summed once, which
/// updates the cross and right-within sums of every tau in O(1): O(n^2) time
/// and O(n) memory per scan. Ties keep the smallest tau, then smallest kappa.
inline LocalSplit scan_best_split(const DistanceTable& dist, std::span<const std::size_t> ids,
                                  std::size_t min_segment, SplitSearch search) {
    const std::size_t n = ids.size();
    std::vector<double> prefix(n + 1, 0.0);
    std::vector<double> within_left(n + 1, 0.0);   // by left size
    std::vector<double> cross(n + 1, 0.0);         // by tau, for the current end
    std::vector<double> within_right(n + 1, 0.0);
    LocalSplit best{min_segment, n, 0.0};
    bool have = false;
    for (std::size_t end = 0; end < n; ++end) {
        // prefix[i] = sum_{j < i} d(ids[j], ids[end])
        prefix[0] = 0.0;
        for (std::size_t i = 0; i < end; ++i) {
            prefix[i + 1] = prefix[i] + dist(ids[i], ids[end]);
        }
        within_left[end + 1] = within_left[end] + prefix[end];
        const std::size_t tau_hi = std::min(end, n - min_segment);
        for (std::size_t tau = min_segment; tau <= tau_hi; ++tau) {
            cross[tau] += prefix[tau];
            within_right[tau] += prefix[end] - prefix[tau];
        }
        if (search == SplitSearch::suffix && end + 1 != n) {
            continue;
        }
        if (end + 1 < 2 * min_segment) {
            continue;
        }
        const std::size_t eval_hi = std::min(end + 1 - min_segment, n - min_segment);
        for (std::size_t tau = min_segment; tau <= eval_hi; ++tau) {
            const double q = scaled_energy(cross[tau], within_left[tau], within_right[tau], tau,
                                           end + 1 - tau);
            if (!have || q > best.statistic ||
                (q == best.statistic && tau < best.offset)) {
                best = LocalSplit{tau, end + 1, q};
                have = true;
            }
        }
    }
    return best;
}

} // namespace detail

/// Scaled two-sample energy divergence Q between samples X and Y (rows are
/// observations). Within-sample terms of singleton samples are zero.
inline double energy_divergence(const TimeSeries& first, const TimeSeries& second,
                                double alpha = 1.0) {
    if (first.dim() != second.dim()) {
        throw InvalidInput("energy divergence samples must share a dimension");
    }
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw InvalidInput("energy exponent alpha must lie in (0, 2)");
    }
    // Accumulate in a canonical sample order so Q(X,Y) == Q(Y,X) bit for bit.
    const auto a = first.data();
    const auto b = second.data();
    const bool swap = std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
    const TimeSeries& x = swap ? second : first;
    const TimeSeries& y = swap ? first : second;
    const std::size_t m = x.length();
    const std::size_t n = y.length();
    double cross = 0.0, within_x = 0.0, within_y = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cross += detail::powered_distance(x.point(i), y.point(j), alpha);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = i + 1; k < m; ++k) {
            within_x += detail::powered_distance(x.point(i), x.point(k), alpha);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            within_y += detail::powered_distance(y.point(j), y.point(k), alpha);
        }
    }
    return detail::scaled_energy(cross, within_x, within_y, m, n);
}

/// Split maximizing Q(left, right) with both samples >= min_segment long;
/// ties go to the smallest index. See SplitSearch for the right sample's extent.
inline Split best_single_split(const TimeSeries& series, const EnergyConfig& cfg) {
    cfg.validate();
    admissible_splits(series.length(), cfg.min_segment);
    const detail::DistanceTable dist(series, cfg.alpha, cfg.cache_limit);
    std::vector<std::size_t> ids(series.length());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    const auto best = detail::scan_best_split(dist, ids, cfg.min_segment, cfg.search);
    return Split{best.offset + 1, best.statistic, best.right_end};
}

/// Hierarchical energy bisection for a known number of change points. Each
/// step splits whichever current segment admits the largest Q.
inline DetectionResult e_divisive(const TimeSeries& series, const EnergyConfig& cfg) {
    cfg.validate();
    const std::size_t n = series.length();
    if (n < (cfg.k + 1) * cfg.min_segment) {
        throw InvalidInput("series of length " + std::to_string(n) + " cannot hold " +
                           std::to_string(cfg.k) + " change points with min_segment " +
                           std::to_string(cfg.min_segment));
    }
    const detail::DistanceTable dist(series, cfg.alpha, cfg.cache_limit);

    struct Segment {
        std::size_t begin, end;   // 0-based [begin, end)
        std::optional<detail::LocalSplit> best;
        bool scanned = false;
    };
    std::vector<Segment> segments{{0, n, std::nullopt, false}};

    struct Found {
        std::size_t index;
        double statistic;
        double p_value;
    };
    std::vector<Found> found;

    for (std::size_t step = 0; step < cfg.k; ++step) {
        std::optional<std::size_t> pick;
        for (std::size_t s = 0; s < segments.size(); ++s) {
            auto& seg = segments[s];
            if (!seg.scanned) {
                seg.scanned = true;
                if (seg.end - seg.begin >= 2 * cfg.min_segment) {
                    std::vector<std::size_t> ids(seg.end - seg.begin);
                    std::iota(ids.begin(), ids.end(), seg.begin);
                    seg.best = detail::scan_best_split(dist, ids, cfg.min_segment, cfg.search);
                }
            }
            if (!seg.best) {
                continue;
            }
            // Segments are kept in time order, so strict > keeps the earliest on ties.
            if (!pick || seg.best->statistic > segments[*pick].best->statistic) {
                pick = s;
            }
        }
        if (!pick) {
            throw InvalidInput("no segment admits another split after " + std::to_string(step) +
                               " change points (k=" + std::to_string(cfg.k) +
                               ", min_segment=" + std::to_string(cfg.min_segment) + ")");
        }
        const Segment chosen = segments[*pick];
        const std::size_t cut = chosen.begin + chosen.best->offset;

        double p_value = -1.0;
        if (cfg.permutations > 0) {
            auto rng = make_rng(child_seed(cfg.seed, step));
            std::vector<std::size_t> ids(chosen.end - chosen.begin);
            std::size_t at_least = 0;
            for (std::size_t r = 0; r < cfg.permutations; ++r) {
                std::iota(ids.begin(), ids.end(), chosen.begin);
                std::shuffle(ids.begin(), ids.end(), rng);
                if (detail::scan_best_split(dist, ids, cfg.min_segment, cfg.search).statistic >=
                    chosen.best->statistic) {
                    ++at_least;
                }
            }
            p_value = static_cast<double>(at_least) / static_cast<double>(cfg.permutations);
        }
        found.push_back({cut + 1, chosen.best->statistic, p_value});

        segments.erase(segments.begin() + static_cast<std::ptrdiff_t>(*pick));
        segments.insert(segments.begin() + static_cast<std::ptrdiff_t>(*pick),
                        {Segment{chosen.begin, cut, std::nullopt, false},
                         Segment{cut, chosen.end, std::nullopt, false}});
    }

    std::sort(found.begin(), found.end(),
              [](const Found& a, const Found& b) { return a.index < b.index; });
    DetectionResult result;
    result.detector = Detector::e_divisive;
    for (const auto& f : found) {
        result.change_points.push_back(f.index);
        result.statistics.push_back(f.statistic);
        if (cfg.permutations > 0) {
            result.p_values.push_back(f.p_value);
        }
    }
    return result;
}

} // namespace tdacpd
