#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tdacpd/error.hpp"
#include "tdacpd/series.hpp"

namespace tdacpd {

/// y_t - mu = sum_j phi_j (y_{t-j} - mu) + e_t.
struct ArModel {
    std::size_t order = 0;
    std::vector<double> coefficients;
    double intercept = 0.0;
    double noise_variance = 0.0;
};

/// A transformed series whose entry i (0-based) corresponds to original
/// observation i + offset.
struct OffsetSeries {
    TimeSeries series;
    std::size_t offset = 0;
};

/// Biased (1/T) sample autocovariances at lags 0..max_lag.
inline std::vector<double> autocovariance(std::span<const double> y, std::size_t max_lag) {
    const std::size_t n = y.size();
    if (n == 0 || max_lag >= n) {
        throw InvalidInput("autocovariance lag " + std::to_string(max_lag) +
                           " needs more than that many observations");
    }
    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    std::vector<double> gamma(max_lag + 1, 0.0);
    for (std::size_t h = 0; h <= max_lag; ++h) {
        double s = 0.0;
        for (std::size_t t = h; t < n; ++t) {
            s += (y[t] - mean) * (y[t - h] - mean);
        }
        gamma[h] = s / static_cast<double>(n);
    }
    return gamma;
}

/// Yule-Walker AR(p) fit solved with the Levinson-Durbin recursion.
inline ArModel fit_ar(const TimeSeries& series, std::size_t p) {
    if (!series.is_univariate()) {
        throw Unsupported("AR fitting needs a univariate series");
    }
    const auto y = series.data();
    if (y.size() <= p + 1) {
        throw InvalidInput("AR(" + std::to_string(p) + ") needs more than " +
                           std::to_string(p + 1) + " observations");
    }
    const auto gamma = autocovariance(y, p);
    if (!(gamma[0] > 0.0)) {
        throw FitError("cannot fit an AR model to a constant series");
    }
    ArModel model;
    model.order = p;
    for (double v : y) {
        model.intercept += v;
    }
    model.intercept /= static_cast<double>(y.size());

    std::vector<double> phi(p, 0.0), prev(p, 0.0);
    double err = gamma[0];
    for (std::size_t k = 1; k <= p; ++k) {
        double acc = gamma[k];
        for (std::size_t j = 1; j < k; ++j) {
            acc -= phi[j - 1] * gamma[k - j];
        }
        const double reflection = acc / err;
        prev = phi;
        phi[k - 1] = reflection;
        for (std::size_t j = 1; j < k; ++j) {
            phi[j - 1] = prev[j - 1] - reflection * prev[k - j - 1];
        }
        err *= 1.0 - reflection * reflection;
        if (!(err > 0.0)) {
            throw FitError("Yule-Walker system is singular at lag " + std::to_string(k));
        }
    }
    model.coefficients = std::move(phi);
    model.noise_variance = err;
    return model;
}

/// e_t = y_t - mu - sum_j phi_j (y_{t-j} - mu) for t = p+1..T; offset p.
inline OffsetSeries ar_residuals(const TimeSeries& series, const ArModel& model) {
    if (!series.is_univariate()) {
        throw Unsupported("AR residuals need a univariate series");
    }
    const auto y = series.data();
    const std::size_t p = model.order;
    if (model.coefficients.size() != p) {
        throw InvalidInput("AR model has inconsistent order");
    }
    if (y.size() <= p) {
        throw InvalidInput("series too short for AR(" + std::to_string(p) + ") residuals");
    }
    std::vector<double> e(y.size() - p);
    for (std::size_t t = p; t < y.size(); ++t) {
        double r = y[t] - model.intercept;
        for (std::size_t j = 1; j <= p; ++j) {
            r -= model.coefficients[j - 1] * (y[t - j] - model.intercept);
        }
        e[t - p] = r;
    }
    return OffsetSeries{TimeSeries::univariate(std::move(e)), p};
}

/// Repeated first differences; works coordinate-wise on multivariate series.
inline OffsetSeries difference(const TimeSeries& series, std::size_t order = 1) {
    if (order == 0) {
        return OffsetSeries{series, 0};
    }
    if (series.length() <= order) {
        throw InvalidInput("series of length " + std::to_string(series.length()) +
                           " is too short for differencing of order " + std::to_string(order));
    }
    const std::size_t dim = series.dim();
    std::vector<double> cur(series.data().begin(), series.data().end());
    std::size_t len = series.length();
    for (std::size_t r = 0; r < order; ++r) {
        std::vector<double> next((len - 1) * dim);
        for (std::size_t t = 1; t < len; ++t) {
            for (std::size_t j = 0; j < dim; ++j) {
                next[(t - 1) * dim + j] = cur[t * dim + j] - cur[(t - 1) * dim + j];
            }
        }
        cur = std::move(next);
        --len;
    }
    return OffsetSeries{TimeSeries(std::move(cur), dim), order};
}

} // namespace tdacpd
