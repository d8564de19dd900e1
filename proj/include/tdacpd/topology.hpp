#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tdacpd/error.hpp"
#include "tdacpd/series.hpp"
#include "tdacpd/union_find.hpp"

namespace tdacpd {

/// Strictly increasing, nonnegative filtration scales eps_1 < ... < eps_n.
class ScaleGrid {
public:
    explicit ScaleGrid(std::vector<double> scales) : scales_(std::move(scales)) {
        if (scales_.empty()) {
            throw InvalidInput("scale grid must contain at least one scale");
        }
        if (!(scales_.front() >= 0.0)) {
            throw InvalidInput("scale grid must start at a nonnegative value");
        }
        for (std::size_t i = 1; i < scales_.size(); ++i) {
            if (!(scales_[i] > scales_[i - 1])) {
                throw InvalidInput("scale grid must be strictly increasing (index " +
                                   std::to_string(i + 1) + ")");
            }
        }
        if (!std::isfinite(scales_.back())) {
            throw InvalidInput("scale grid values must be finite");
        }
    }

    /// eps_i = start + step * (i - 1), i = 1..n.
    static ScaleGrid uniform(std::size_t n, double step, double start = 0.0) {
        if (n == 0 || !(step > 0.0)) {
            throw InvalidInput("uniform grid needs n >= 1 and a positive step");
        }
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = start + step * static_cast<double>(i);
        }
        return ScaleGrid(std::move(s));
    }

    /// 50 scales 0, 0.01, ..., 0.49.
    static ScaleGrid standard() { return uniform(50, 0.01); }

    std::size_t size() const noexcept { return scales_.size(); }
    double operator[](std::size_t i) const { return scales_[i]; }
    std::span<const double> values() const noexcept { return scales_; }

    friend bool operator==(const ScaleGrid&, const ScaleGrid&) = default;

private:
    std::vector<double> scales_;
};

/// beta_0 over a scale grid for one window.
struct BettiSequence {
    std::vector<std::size_t> counts;
    std::size_t window_origin = 0;

    friend bool operator==(const BettiSequence&, const BettiSequence&) = default;
};

/// Rows are windows (in window order), columns are grid scales.
class BettiMatrix {
public:
    BettiMatrix(std::vector<BettiSequence> rows, std::size_t scales)
        : rows_(std::move(rows)), scales_(scales) {
        if (rows_.empty()) {
            throw InvalidInput("Betti matrix needs at least one row");
        }
        for (const auto& r : rows_) {
            if (r.counts.size() != scales_) {
                throw InvalidInput("Betti rows must all have " + std::to_string(scales_) +
                                   " entries");
            }
        }
    }

    std::size_t rows() const noexcept { return rows_.size(); }
    std::size_t cols() const noexcept { return scales_; }
    const BettiSequence& row(std::size_t i) const { return rows_[i]; }
    double operator()(std::size_t i, std::size_t j) const {
        return static_cast<double>(rows_[i].counts[j]);
    }
    const std::vector<BettiSequence>& row_list() const noexcept { return rows_; }

private:
    std::vector<BettiSequence> rows_;
    std::size_t scales_;
};

namespace detail {

inline double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace detail

/// Single-linkage merge heights of a cloud: the w - 1 edge lengths at which
/// the number of components drops, in increasing order.
inline std::vector<double> merge_heights(const PointCloud& cloud) {
    const std::size_t w = cloud.size();
    struct Edge {
        double length;
        std::size_t a, b;
    };
    std::vector<Edge> edges;
    edges.reserve(w * (w - 1) / 2);
    for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = i + 1; j < w; ++j) {
            edges.push_back({detail::euclidean(cloud.point(i), cloud.point(j)), i, j});
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& x, const Edge& y) { return x.length < y.length; });
    UnionFind<std::size_t> uf(w);
    std::vector<double> heights;
    heights.reserve(w > 0 ? w - 1 : 0);
    for (const auto& e : edges) {
        if (uf.unite(e.a, e.b)) {
            heights.push_back(e.length);
            if (uf.components() == 1) {
                break;
            }
        }
    }
    return heights;
}

/// beta_0 of the Vietoris-Rips complex at every grid scale. Two points are
/// joined at scale eps when their distance is <= eps.
inline BettiSequence betti0_sequence(const PointCloud& cloud, const ScaleGrid& grid) {
    if (cloud.empty()) {
        throw InvalidInput("cannot compute Betti numbers of an empty point cloud");
    }
    // Component count only changes at single-linkage merge heights, so the
    // sorted-edge sweep reduces to walking the w - 1 heights along the grid.
    const auto heights = merge_heights(cloud);
    BettiSequence out;
    out.window_origin = cloud.origin_index();
    out.counts.resize(grid.size());
    std::size_t merged = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        while (merged < heights.size() && heights[merged] <= grid[i]) {
            ++merged;
        }
        out.counts[i] = cloud.size() - merged;
    }
    return out;
}

inline BettiMatrix betti_matrix(std::span<const PointCloud> clouds, const ScaleGrid& grid) {
    if (clouds.empty()) {
        throw InvalidInput("betti_matrix needs at least one point cloud");
    }
    const std::size_t w = clouds.front().size();
    const std::size_t dim = clouds.front().dim();
    std::vector<BettiSequence> rows;
    rows.reserve(clouds.size());
    for (const auto& c : clouds) {
        if (c.size() != w || c.dim() != dim) {
            throw InvalidInput("inconsistent window sizes: expected " + std::to_string(w) +
                               " points, window " + std::to_string(c.origin_index()) + " has " +
                               std::to_string(c.size()));
        }
        rows.push_back(betti0_sequence(c, grid));
    }
    return BettiMatrix(std::move(rows), grid.size());
}

} // namespace tdacpd
