#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tdacpd/error.hpp"

namespace tdacpd {

/// Time-ordered observations y_1..y_T in R^dim, stored row-major.
///
/// Positions passed to `point` and `at` are 0-based. Anything reported to
/// users (window origins, change points) is 1-based.
class TimeSeries {
public:
    TimeSeries(std::vector<double> values, std::size_t dim)
        : values_(std::move(values)), dim_(dim) {
        if (dim_ == 0) {
            throw InvalidInput("time series dimension must be positive");
        }
        if (values_.empty()) {
            throw InvalidInput("time series must contain at least one observation");
        }
        if (values_.size() % dim_ != 0) {
            throw InvalidInput("value count " + std::to_string(values_.size()) +
                               " is not a multiple of dimension " + std::to_string(dim_));
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw InvalidInput("non-finite value at observation " +
                                   std::to_string(i / dim_ + 1) + ", coordinate " +
                                   std::to_string(i % dim_ + 1));
            }
        }
    }

    static TimeSeries univariate(std::vector<double> values) {
        return TimeSeries(std::move(values), 1);
    }

    static TimeSeries from_points(const std::vector<std::vector<double>>& points) {
        if (points.empty()) {
            throw InvalidInput("time series must contain at least one observation");
        }
        const std::size_t dim = points.front().size();
        std::vector<double> flat;
        flat.reserve(points.size() * dim);
        for (std::size_t t = 0; t < points.size(); ++t) {
            if (points[t].size() != dim) {
                throw InvalidInput("observation " + std::to_string(t + 1) + " has " +
                                   std::to_string(points[t].size()) +
                                   " coordinates, expected " + std::to_string(dim));
            }
            flat.insert(flat.end(), points[t].begin(), points[t].end());
        }
        return TimeSeries(std::move(flat), dim);
    }

    std::size_t length() const noexcept { return values_.size() / dim_; }
    std::size_t dim() const noexcept { return dim_; }
    bool is_univariate() const noexcept { return dim_ == 1; }

    std::span<const double> point(std::size_t t) const {
        return std::span<const double>(values_).subspan(t * dim_, dim_);
    }
    double at(std::size_t t, std::size_t j) const { return values_[t * dim_ + j]; }

    std::span<const double> data() const noexcept { return values_; }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out(length());
        for (std::size_t t = 0; t < out.size(); ++t) {
            out[t] = at(t, j);
        }
        return out;
    }

    /// Observations [first, first + count).
    TimeSeries slice(std::size_t first, std::size_t count) const {
        if (count == 0 || first + count > length()) {
            throw InvalidInput("slice [" + std::to_string(first) + ", " +
                               std::to_string(first + count) + ") out of range for length " +
                               std::to_string(length()));
        }
        auto begin = values_.begin() + static_cast<std::ptrdiff_t>(first * dim_);
        return TimeSeries(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * dim_)),
                          dim_);
    }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> values_;
    std::size_t dim_;
};

struct WindowConfig {
    std::size_t size;

    void validate(std::size_t series_length) const {
        if (size < 2) {
            throw InvalidWindow("window size must be at least 2, got " + std::to_string(size));
        }
        if (size > series_length) {
            throw InvalidWindow("window size " + std::to_string(size) +
                                " exceeds series length " + std::to_string(series_length));
        }
    }
};

/// One window X_t = {y_t, ..., y_{t+w-1}} viewed as a set of points.
class PointCloud {
public:
    PointCloud(std::vector<double> coords, std::size_t dim, std::size_t origin_index)
        : coords_(std::move(coords)), dim_(dim), origin_(origin_index) {
        if (dim_ == 0 || coords_.size() % dim_ != 0) {
            throw InvalidInput("point cloud coordinates do not match dimension");
        }
    }

    std::size_t size() const noexcept { return coords_.size() / dim_; }
    bool empty() const noexcept { return coords_.empty(); }
    std::size_t dim() const noexcept { return dim_; }
    /// 1-based start position of the window in the source series.
    std::size_t origin_index() const noexcept { return origin_; }

    std::span<const double> point(std::size_t i) const {
        return std::span<const double>(coords_).subspan(i * dim_, dim_);
    }

    friend bool operator==(const PointCloud&, const PointCloud&) = default;

private:
    std::vector<double> coords_;
    std::size_t dim_;
    std::size_t origin_;
};

/// Rescales every coordinate to [-1/2, 1/2] using the global min/max of that
/// coordinate. Constant coordinates map to 0.
inline TimeSeries normalize(const TimeSeries& series) {
    const std::size_t n = series.length();
    const std::size_t dim = series.dim();
    std::vector<double> lo(dim), hi(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        lo[j] = hi[j] = series.at(0, j);
    }
    for (std::size_t t = 1; t < n; ++t) {
        for (std::size_t j = 0; j < dim; ++j) {
            lo[j] = std::min(lo[j], series.at(t, j));
            hi[j] = std::max(hi[j], series.at(t, j));
        }
    }
    std::vector<double> out(n * dim);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double range = hi[j] - lo[j];
            out[t * dim + j] = range > 0.0 ? (series.at(t, j) - lo[j]) / range - 0.5 : 0.0;
        }
    }
    return TimeSeries(std::move(out), dim);
}

/// Stride-1 windows; returns T - w + 1 clouds with origins 1..T-w+1.
inline std::vector<PointCloud> sliding_windows(const TimeSeries& series, WindowConfig cfg) {
    cfg.validate(series.length());
    const std::size_t dim = series.dim();
    const std::size_t count = series.length() - cfg.size + 1;
    const auto data = series.data();
    std::vector<PointCloud> clouds;
    clouds.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        auto first = data.begin() + static_cast<std::ptrdiff_t>(t * dim);
        clouds.emplace_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(cfg.size * dim)),
                            dim, t + 1);
    }
    return clouds;
}

} // namespace tdacpd
