#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdacpd/detection.hpp"
#include "tdacpd/energy.hpp"
#include "tdacpd/error.hpp"
#include "tdacpd/io/csv.hpp"
#include "tdacpd/pipeline.hpp"
#include "tdacpd/simulate.hpp"
#include "tdacpd/topology.hpp"

namespace tdacpd::io {

using nlohmann::json;

namespace detail {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("field '") + key + "': " + e.what());
    }
}

inline std::vector<double> flatten_matrix(const json& m, std::size_t d, const char* what) {
    std::vector<double> out;
    if (!m.is_array() || m.size() != d) {
        throw ParseError(std::string(what) + " must be a " + std::to_string(d) + "x" +
                         std::to_string(d) + " nested array");
    }
    for (const auto& row : m) {
        if (!row.is_array() || row.size() != d) {
            throw ParseError(std::string(what) + " rows must have " + std::to_string(d) + " entries");
        }
        for (const auto& v : row) {
            out.push_back(v.get<double>());
        }
    }
    return out;
}

inline json nest_matrix(const std::vector<double>& flat, std::size_t d) {
    json m = json::array();
    for (std::size_t i = 0; i < d; ++i) {
        m.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(i * d),
                                        flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * d)));
    }
    return m;
}

} // namespace detail

/// Uniform grids are written compactly when that form rebuilds them exactly.
inline json grid_to_json(const ScaleGrid& grid) {
    const auto v = grid.values();
    if (v.size() >= 2) {
        const double step = std::stod(format_double(v[1] - v[0]));
        if (ScaleGrid::uniform(v.size(), step, v[0]) == grid) {
            return json{{"size", v.size()}, {"step", step}, {"start", v[0]}};
        }
    }
    return json{{"scales", std::vector<double>(v.begin(), v.end())}};
}

/// Accepts {"scales": [...]} or {"size": n, "step": s, "start": a}.
inline ScaleGrid grid_from_json(const json& j) {
    if (j.contains("scales")) {
        return ScaleGrid(j.at("scales").get<std::vector<double>>());
    }
    return ScaleGrid::uniform(detail::get_or<std::size_t>(j, "size", 50),
                              detail::get_or<double>(j, "step", 0.01),
                              detail::get_or<double>(j, "start", 0.0));
}

inline std::string to_string(SplitSearch s) { return s == SplitSearch::bounded ? "bounded" : "suffix"; }

inline SplitSearch parse_search(const std::string& s) {
    if (s == "bounded") {
        return SplitSearch::bounded;
    }
    if (s == "suffix") {
        return SplitSearch::suffix;
    }
    throw ParseError("unknown split search '" + s + "' (expected bounded or suffix)");
}

inline json config_to_json(const PipelineConfig& c) {
    json j;
    j["window"] = c.window ? json(*c.window) : json(nullptr);
    j["grid"] = grid_to_json(c.grid);
    j["pca"] = c.pca_m;
    j["series"] = c.use_tda ? "tda" : "raw";
    j["detector"] = std::string(tdacpd::to_string(c.detector.detector));
    j["search"] = to_string(c.detector.energy_search);
    j["alpha"] = c.detector.alpha;
    j["k"] = c.detector.k;
    j["min_segment"] = c.detector.min_segment;
    j["permutations"] = c.detector.permutations;
    j["cvm_permutations"] = c.detector.cvm_permutations;
    j["pre"] = c.pre.to_string();
    j["index_offset"] = c.index_offset;
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    return j;
}

inline PipelineConfig config_from_json_unchecked(const json& j, PipelineConfig c) {
    if (!j.is_object()) {
        throw ParseError("config must be a JSON object");
    }
    static const char* known[] = {"window", "grid", "pca", "series", "detector", "search",
                                  "alpha", "k", "min_segment", "permutations",
                                  "cvm_permutations", "pre", "index_offset", "seed"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ParseError("unknown config key '" + key + "'");
        }
    }
    if (j.contains("window")) {
        c.window = j.at("window").is_null() ? std::nullopt
                                            : std::optional<std::size_t>(j.at("window").get<std::size_t>());
    }
    if (j.contains("grid")) {
        c.grid = grid_from_json(j.at("grid"));
    }
    c.pca_m = detail::get_or<std::size_t>(j, "pca", c.pca_m);
    if (j.contains("series")) {
        const auto s = j.at("series").get<std::string>();
        if (s != "tda" && s != "raw") {
            throw ParseError("series must be 'tda' or 'raw', got '" + s + "'");
        }
        c.use_tda = s == "tda";
    }
    if (j.contains("detector")) {
        c.detector.detector = parse_detector(j.at("detector").get<std::string>());
    }
    if (j.contains("search")) {
        c.detector.energy_search = parse_search(j.at("search").get<std::string>());
    }
    c.detector.alpha = detail::get_or<double>(j, "alpha", c.detector.alpha);
    c.detector.k = detail::get_or<std::size_t>(j, "k", c.detector.k);
    c.detector.min_segment = detail::get_or<std::size_t>(j, "min_segment", c.detector.min_segment);
    c.detector.permutations = detail::get_or<std::size_t>(j, "permutations", c.detector.permutations);
    c.detector.cvm_permutations =
        detail::get_or<std::size_t>(j, "cvm_permutations", c.detector.cvm_permutations);
    if (j.contains("pre")) {
        c.pre = Preprocessing::parse(j.at("pre").get<std::string>());
    }
    c.index_offset = detail::get_or<long>(j, "index_offset", c.index_offset);
    if (j.contains("seed")) {
        c.seed = j.at("seed").is_null() ? std::nullopt
                                        : std::optional<std::uint64_t>(j.at("seed").get<std::uint64_t>());
    }
    return c;
}

inline json distribution_to_json(const Distribution& d) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>) {
                return {{"type", "normal"}, {"mean", v.mean}, {"scale", v.scale}};
            } else if constexpr (std::is_same_v<T, MvNormal>) {
                return {{"type", "mvnormal"}, {"mean", v.mean},
                        {"cov", detail::nest_matrix(v.cov, v.mean.size())}};
            } else if constexpr (std::is_same_v<T, PoissonAdjusted>) {
                return {{"type", "poisson"}, {"lambda", v.lambda}};
            } else if constexpr (std::is_same_v<T, StudentT>) {
                return {{"type", "t"}, {"dof", v.dof}};
            } else if constexpr (std::is_same_v<T, MvStudentT>) {
                return {{"type", "mvt"}, {"dof", v.dof}, {"mean", v.mean},
                        {"cov", detail::nest_matrix(v.cov, v.mean.size())}};
            } else {
                return {{"type", "laplace"}, {"scale", v.scale}};
            }
        },
        d);
}

inline Distribution distribution_from_json(const json& j) {
    const auto type = detail::get_or<std::string>(j, "type", "");
    if (type == "normal") {
        return Normal{detail::get_or<double>(j, "mean", 0.0), detail::get_or<double>(j, "scale", 1.0)};
    }
    if (type == "poisson") {
        return PoissonAdjusted{detail::get_or<double>(j, "lambda", 1.0)};
    }
    if (type == "t") {
        return StudentT{detail::get_or<double>(j, "dof", 4.0)};
    }
    if (type == "laplace") {
        return Laplace{detail::get_or<double>(j, "scale", 1.0)};
    }
    if (type == "mvnormal" || type == "mvt") {
        auto mean = detail::get_or<std::vector<double>>(j, "mean", {});
        if (mean.empty()) {
            throw ParseError(type + " needs a nonempty 'mean'");
        }
        auto cov = detail::flatten_matrix(j.value("cov", json()), mean.size(), "cov");
        if (type == "mvnormal") {
            return MvNormal{std::move(mean), std::move(cov)};
        }
        return MvStudentT{detail::get_or<double>(j, "dof", 2.0), std::move(mean), std::move(cov)};
    }
    throw ParseError("unknown distribution type '" + type +
                     "' (expected normal, mvnormal, poisson, t, mvt, laplace)");
}

inline json scenario_to_json(const ScenarioSpec& s) {
    json j;
    j["name"] = s.name;
    j["length"] = s.length;
    j["change_points"] = s.change_points;
    j["scale_notation"] = s.normal_notation == ScaleNotation::variance ? "variance" : "sd";
    j["segments"] = json::array();
    for (const auto& d : s.segments) {
        j["segments"].push_back(distribution_to_json(d));
    }
    if (s.arma) {
        j["arma"] = {{"ar", s.arma->ar}, {"ma", s.arma->ma}, {"burn_in", s.arma->burn_in}};
    }
    return j;
}

inline ScenarioSpec scenario_from_json_unchecked(const json& j) {
    ScenarioSpec s;
    s.name = detail::get_or<std::string>(j, "name", "scenario");
    s.length = detail::get_or<std::size_t>(j, "length", 200);
    s.change_points = detail::get_or<std::vector<std::size_t>>(j, "change_points", {});
    const auto notation = detail::get_or<std::string>(j, "scale_notation", "sd");
    if (notation == "variance") {
        s.normal_notation = ScaleNotation::variance;
    } else if (notation == "sd") {
        s.normal_notation = ScaleNotation::std_dev;
    } else {
        throw ParseError("scale_notation must be 'sd' or 'variance'");
    }
    if (!j.contains("segments") || !j.at("segments").is_array()) {
        throw ParseError("scenario '" + s.name + "' needs a 'segments' array");
    }
    for (const auto& seg : j.at("segments")) {
        s.segments.push_back(distribution_from_json(seg));
    }
    if (j.contains("arma")) {
        const auto& a = j.at("arma");
        s.arma = ArmaSpec{detail::get_or<double>(a, "ar", 0.4), detail::get_or<double>(a, "ma", 0.5),
                          detail::get_or<std::size_t>(a, "burn_in", 100)};
    }
    return s;
}

/// Runs a JSON reader, reporting malformed documents as ParseError.
template <typename F>
auto parse_json_as(const char* what, F&& read) {
    try {
        return read();
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid ") + what + ": " + e.what());
    }
}

/// Missing keys keep their defaults, so partial config files are valid.
inline PipelineConfig config_from_json(const json& j, PipelineConfig c = {}) {
    return parse_json_as("config", [&] { return config_from_json_unchecked(j, std::move(c)); });
}

inline ScenarioSpec scenario_from_json(const json& j) {
    return parse_json_as("scenario", [&] { return scenario_from_json_unchecked(j); });
}

} // namespace tdacpd::io
