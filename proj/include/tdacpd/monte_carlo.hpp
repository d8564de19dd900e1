#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tdacpd/detection.hpp"
#include "tdacpd/embedding.hpp"
#include "tdacpd/error.hpp"
#include "tdacpd/pipeline.hpp"
#include "tdacpd/random.hpp"
#include "tdacpd/simulate.hpp"

namespace tdacpd {

struct MonteCarloConfig {
    DetectorSettings detector;
    std::size_t window = 10;
    ScaleGrid grid = ScaleGrid::standard();
    std::size_t pca_m = 3;
    bool run_raw = true;
    bool run_tda = true;
    std::size_t threads = 1;
};

/// Absolute-error summary for one series kind.
struct ErrorSummary {
    SeriesKind kind = SeriesKind::raw;
    double mae = 0.0;
    double abs_error_variance = 0.0;   // sample variance of |estimate - truth|
    std::size_t replications = 0;      // successful replications
    std::size_t failures = 0;
    std::string first_failure;
    std::vector<long> estimates;       // per replication; -1 marks a failure

    friend bool operator==(const ErrorSummary&, const ErrorSummary&) = default;
};

struct BenchmarkReport {
    std::string scenario;
    std::size_t truth = 0;
    std::size_t requested = 0;
    std::uint64_t seed = 0;
    Detector detector = Detector::e_divisive;
    std::size_t window = 0;
    std::size_t pca_m = 0;
    std::optional<ErrorSummary> raw;
    std::optional<ErrorSummary> tda;

    friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

/// Mean and sample variance of |estimate - truth| over successful entries.
inline ErrorSummary summarize_errors(SeriesKind kind, const std::vector<long>& estimates,
                                     std::size_t truth) {
    ErrorSummary s;
    s.kind = kind;
    s.estimates = estimates;
    std::vector<double> errors;
    for (long e : estimates) {
        if (e < 0) {
            ++s.failures;
            continue;
        }
        errors.push_back(std::abs(static_cast<double>(e) - static_cast<double>(truth)));
    }
    s.replications = errors.size();
    if (errors.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double e : errors) {
        sum += e;
    }
    s.mae = sum / static_cast<double>(errors.size());
    if (errors.size() > 1) {
        double ss = 0.0;
        for (double e : errors) {
            ss += (e - s.mae) * (e - s.mae);
        }
        s.abs_error_variance = ss / static_cast<double>(errors.size() - 1);
    }
    return s;
}

/// Seed of the series drawn in replication r.
inline std::uint64_t replication_seed(std::uint64_t seed, std::size_t r) {
    return child_seed(seed, r);
}

/// Runs R independent replications of a single-change scenario, detecting on
/// the raw and/or topologically derived series. A replication whose detector
/// throws is counted as failed and excluded from the error summary.
inline BenchmarkReport monte_carlo(const ScenarioSpec& spec, const MonteCarloConfig& cfg,
                                   std::size_t replications, std::uint64_t seed) {
    spec.validate();
    if (replications < 1) {
        throw InvalidInput("Monte Carlo needs at least one replication");
    }
    if (spec.change_points.empty()) {
        throw InvalidSpec("Monte Carlo scenarios need a true change point");
    }
    const std::size_t truth = spec.change_points.front();
    DetectorSettings settings = cfg.detector;
    settings.k = 1;
    const std::size_t tda_m = univariate_only(settings.detector) ? 1 : cfg.pca_m;

    std::vector<long> raw(replications, -1), tda(replications, -1);
    std::vector<std::string> raw_err(replications), tda_err(replications);

    auto run_one = [&](std::size_t r) {
        const std::uint64_t s = replication_seed(seed, r);
        const TimeSeries series = generate(spec, s);
        DetectorSettings local = settings;
        local.seed = child_seed(s, 1);
        if (cfg.run_raw) {
            try {
                raw[r] = static_cast<long>(run_detector(series, local, SeriesKind::raw).change_points.front());
            } catch (const Error& e) {
                raw_err[r] = e.what();
            }
        }
        if (cfg.run_tda) {
            try {
                const auto derived = tda_transform(series, cfg.window, cfg.grid, tda_m);
                tda[r] = static_cast<long>(
                    run_detector(derived.values, local, SeriesKind::tda_derived).change_points.front());
            } catch (const Error& e) {
                tda_err[r] = e.what();
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, replications));
    if (workers == 1) {
        for (std::size_t r = 0; r < replications; ++r) {
            run_one(r);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < replications; r = next++) {
                    run_one(r);
                }
            });
        }
    }

    auto first_error = [](const std::vector<std::string>& errs) {
        for (const auto& e : errs) {
            if (!e.empty()) {
                return e;
            }
        }
        return std::string{};
    };

    BenchmarkReport report;
    report.scenario = spec.name;
    report.truth = truth;
    report.requested = replications;
    report.seed = seed;
    report.detector = settings.detector;
    report.window = cfg.window;
    report.pca_m = tda_m;
    if (cfg.run_raw) {
        report.raw = summarize_errors(SeriesKind::raw, raw, truth);
        report.raw->first_failure = first_error(raw_err);
    }
    if (cfg.run_tda) {
        report.tda = summarize_errors(SeriesKind::tda_derived, tda, truth);
        report.tda->first_failure = first_error(tda_err);
    }
    return report;
}

} // namespace tdacpd
