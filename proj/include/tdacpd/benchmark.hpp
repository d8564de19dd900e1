#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdacpd/detection.hpp"
#include "tdacpd/error.hpp"
#include "tdacpd/io/csv.hpp"
#include "tdacpd/io/json.hpp"
#include "tdacpd/monte_carlo.hpp"
#include "tdacpd/simulate.hpp"

namespace tdacpd {

/// A grid of Monte Carlo cells: scenarios x detectors x windows x PCA sizes.
struct SweepSpec {
    std::string name = "sweep";
    std::vector<ScenarioSpec> scenarios;
    std::vector<std::size_t> windows;          // absolute window sizes
    std::vector<double> window_percents;       // or percentages of T
    std::vector<std::size_t> pca{3};
    std::vector<Detector> detectors{Detector::e_divisive};
    bool run_raw = true;
    bool run_tda = true;
    std::size_t replications = 200;
    std::uint64_t seed = 0;
    std::size_t min_segment = 30;
    std::size_t threads = 1;
    ScaleGrid grid = ScaleGrid::standard();

    /// Window sizes for a series of length T, in listed order.
    std::vector<std::size_t> windows_for(std::size_t length) const {
        if (!windows.empty()) {
            return windows;
        }
        std::vector<std::size_t> out;
        for (double p : window_percents) {
            out.push_back(static_cast<std::size_t>(std::lround(p / 100.0 * static_cast<double>(length))));
        }
        return out;
    }

    void validate() const {
        if (scenarios.empty()) {
            throw InvalidInput("sweep has no scenarios");
        }
        if (windows.empty() == window_percents.empty()) {
            throw InvalidInput("sweep needs exactly one of windows or window_percents");
        }
        if (pca.empty() || detectors.empty()) {
            throw InvalidInput("sweep needs at least one PCA size and one detector");
        }
        if (replications < 1) {
            throw InvalidInput("sweep needs at least one replication");
        }
        if (!run_raw && !run_tda) {
            throw InvalidInput("sweep runs neither raw nor tda series");
        }
    }
};

/// One row of a sweep report. Raw rows carry window 0 and pca 0.
struct SweepRow {
    std::string scenario;
    std::size_t window = 0;
    Detector detector = Detector::e_divisive;
    SeriesKind kind = SeriesKind::raw;
    std::size_t pca_m = 0;
    double mae = 0.0;
    double abs_error_variance = 0.0;
    std::size_t replications = 0;
    std::size_t failures = 0;
    std::string status = "ok";   // ok | skipped | failed
    std::string reason;
};

namespace presets {

/// Variance-shift designs on T=200, tau=100, absolute windows 5 and 10.
inline SweepSpec table1(std::size_t replications = 200, std::uint64_t seed = 20240101) {
    SweepSpec s;
    s.name = "table1";
    s.scenarios = {scenarios::normal_variance(200, 100, ScaleNotation::variance),
                   scenarios::mvnormal_covariance(200, 100), scenarios::poisson_variance(200, 100),
                   scenarios::arma_error_variance(200, 100, ScaleNotation::variance)};
    s.windows = {5, 10};
    s.pca = {1, 2, 3};
    s.detectors = {Detector::e_divisive, Detector::cvm, Detector::bartlett};
    s.replications = replications;
    s.seed = seed;
    return s;
}

/// Distributional-shift designs with windows as 2.5% and 5% of T.
inline SweepSpec table2(std::size_t replications = 200, std::uint64_t seed = 20240102) {
    SweepSpec s;
    s.name = "table2";
    s.scenarios = {scenarios::normal_to_t(200, 100), scenarios::mvnormal_to_mvt(200, 100),
                   scenarios::normal_to_laplace(200, 100)};
    s.window_percents = {2.5, 5.0};
    s.pca = {1, 2, 3};
    s.detectors = {Detector::e_divisive, Detector::cvm};
    s.replications = replications;
    s.seed = seed;
    return s;
}

inline SweepSpec by_name(const std::string& name, std::size_t replications, std::uint64_t seed) {
    if (name == "table1") {
        return table1(replications, seed);
    }
    if (name == "table2") {
        return table2(replications, seed);
    }
    throw InvalidInput("unknown sweep preset '" + name + "' (expected table1 or table2)");
}

} // namespace presets

namespace detail {

inline SweepRow row_from(const std::string& scenario, std::size_t window, Detector d,
                         std::size_t m, const ErrorSummary& e) {
    SweepRow row{scenario, window, d, e.kind, m, e.mae, e.abs_error_variance, e.replications,
                 e.failures, "ok", ""};
    if (e.replications == 0) {
        row.status = "failed";
        row.reason = e.first_failure;
    } else if (e.failures > 0) {
        row.reason = e.first_failure;
    }
    return row;
}

inline SweepRow skipped(const std::string& scenario, std::size_t window, Detector d,
                        SeriesKind kind, std::size_t m, std::string reason) {
    SweepRow row;
    row.scenario = scenario;
    row.window = window;
    row.detector = d;
    row.kind = kind;
    row.pca_m = m;
    row.status = "skipped";
    row.reason = std::move(reason);
    return row;
}

} // namespace detail

/// Runs every cell. Raw rows are computed once per (scenario, detector);
/// TDA rows are shared between PCA sizes that resolve to the same effective m.
/// Infeasible cells are recorded as skipped instead of aborting the sweep.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<SweepRow> rows;
    for (std::size_t si = 0; si < spec.scenarios.size(); ++si) {
        const ScenarioSpec& sc = spec.scenarios[si];
        sc.validate();
        // Every scenario draws from its own substream so adding scenarios
        // does not perturb the others.
        const std::uint64_t seed = child_seed(spec.seed, si);
        for (Detector d : spec.detectors) {
            MonteCarloConfig base;
            base.detector.detector = d;
            base.detector.min_segment = spec.min_segment;
            base.grid = spec.grid;
            base.threads = spec.threads;
            if (spec.run_raw) {
                if (univariate_only(d) && sc.dim() > 1) {
                    rows.push_back(detail::skipped(sc.name, 0, d, SeriesKind::raw, 0,
                                                   std::string(to_string(d)) +
                                                       " does not support multivariate series"));
                } else {
                    MonteCarloConfig cfg = base;
                    cfg.run_tda = false;
                    const auto rep = monte_carlo(sc, cfg, spec.replications, seed);
                    rows.push_back(detail::row_from(sc.name, 0, d, 0, *rep.raw));
                }
            }
            if (!spec.run_tda) {
                continue;
            }
            for (std::size_t w : spec.windows_for(sc.length)) {
                std::map<std::size_t, ErrorSummary> by_m;
                for (std::size_t m : spec.pca) {
                    if (w < 2 || w > sc.length) {
                        rows.push_back(detail::skipped(sc.name, w, d, SeriesKind::tda_derived, m,
                                                       "window " + std::to_string(w) +
                                                           " outside [2, " + std::to_string(sc.length) + "]"));
                        continue;
                    }
                    const std::size_t eff = univariate_only(d) ? 1 : m;
                    auto it = by_m.find(eff);
                    if (it == by_m.end()) {
                        MonteCarloConfig cfg = base;
                        cfg.run_raw = false;
                        cfg.window = w;
                        cfg.pca_m = eff;
                        it = by_m.emplace(eff, *monte_carlo(sc, cfg, spec.replications, seed).tda).first;
                    }
                    rows.push_back(detail::row_from(sc.name, w, d, eff, it->second));
                }
            }
        }
    }
    return rows;
}

namespace io {

inline const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols{
        "distributions", "window_size", "detector", "series_kind", "pca_coordinates", "mae",
        "abs_error_variance", "replications", "failures", "status", "reason"};
    return cols;
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c == '\n' ? ' ' : c;
    }
    return out + '"';
}

} // namespace detail

inline json sweep_to_json(const SweepSpec& s) {
    json j;
    j["name"] = s.name;
    j["scenarios"] = json::array();
    for (const auto& sc : s.scenarios) {
        j["scenarios"].push_back(scenario_to_json(sc));
    }
    if (!s.windows.empty()) {
        j["windows"] = s.windows;
    } else {
        j["window_percents"] = s.window_percents;
    }
    j["pca"] = s.pca;
    j["detectors"] = json::array();
    for (Detector d : s.detectors) {
        j["detectors"].push_back(std::string(to_string(d)));
    }
    j["raw"] = s.run_raw;
    j["tda"] = s.run_tda;
    j["replications"] = s.replications;
    j["seed"] = s.seed;
    j["min_segment"] = s.min_segment;
    j["threads"] = s.threads;
    j["grid"] = grid_to_json(s.grid);
    return j;
}

/// A sweep file either names a preset ({"preset": "table1", ...overrides})
/// or lists scenarios explicitly.
inline SweepSpec sweep_from_json_unchecked(const json& j) {
    using tdacpd::io::detail::get_or;
    SweepSpec s;
    if (j.contains("preset")) {
        s = presets::by_name(j.at("preset").get<std::string>(), get_or<std::size_t>(j, "replications", 200),
                             get_or<std::uint64_t>(j, "seed", 0));
    }
    s.name = get_or<std::string>(j, "name", s.name);
    if (j.contains("scenarios")) {
        s.scenarios.clear();
        for (const auto& sc : j.at("scenarios")) {
            s.scenarios.push_back(scenario_from_json(sc));
        }
    }
    if (j.contains("windows")) {
        s.windows = j.at("windows").get<std::vector<std::size_t>>();
        s.window_percents.clear();
    }
    if (j.contains("window_percents")) {
        s.window_percents = j.at("window_percents").get<std::vector<double>>();
        s.windows.clear();
    }
    s.pca = get_or<std::vector<std::size_t>>(j, "pca", s.pca);
    if (j.contains("detectors")) {
        s.detectors.clear();
        for (const auto& d : j.at("detectors")) {
            s.detectors.push_back(parse_detector(d.get<std::string>()));
        }
    }
    s.run_raw = get_or<bool>(j, "raw", s.run_raw);
    s.run_tda = get_or<bool>(j, "tda", s.run_tda);
    s.replications = get_or<std::size_t>(j, "replications", s.replications);
    s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
    s.min_segment = get_or<std::size_t>(j, "min_segment", s.min_segment);
    s.threads = get_or<std::size_t>(j, "threads", s.threads);
    if (j.contains("grid")) {
        s.grid = grid_from_json(j.at("grid"));
    }
    return s;
}

inline SweepSpec sweep_from_json(const json& j) {
    return parse_json_as("sweep", [&] { return sweep_from_json_unchecked(j); });
}

/// Comma-separated report with the sweep definition in '#' header lines.
inline std::string format_sweep(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
    CsvWriter w;
    w.comment("sweep", sweep_to_json(spec).dump());
    w.comment("seed", std::to_string(spec.seed));
    w.row(sweep_columns());
    for (const auto& r : rows) {
        w.row(detail::csv_quote(r.scenario), r.window, std::string(to_string(r.detector)),
              std::string(to_string(r.kind)), r.pca_m, r.mae, r.abs_error_variance, r.replications,
              r.failures, r.status, detail::csv_quote(r.reason));
    }
    return w.str();
}

} // namespace io

} // namespace tdacpd
