#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdacpd/tdacpd.hpp"

namespace tdacpd::cli {

namespace fs = std::filesystem;
using io::json;

/// Flags shared by detect and transform; unset flags leave the config alone.
struct PipelineFlags {
    std::optional<std::string> config;
    std::optional<std::size_t> window;
    std::optional<std::size_t> pca;
    std::optional<std::string> detector;
    std::optional<std::size_t> k;
    std::optional<std::size_t> min_segment;
    std::optional<std::string> pre;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> permutations;
    std::optional<long> index_offset;
    bool raw = false;
    std::string label_column = "auto";
    std::string input;
    std::string out = ".";

    void add_to(CLI::App& app, bool detector_flags) {
        app.add_option("input", input, "CSV file: header row, optional leading label column")
            ->required();
        app.add_option("--config", config, "JSON config file; flags override its values");
        app.add_option("--window", window, "sliding window size (default max(5, 5% of T))");
        app.add_option("--pca", pca, "number of principal components");
        app.add_option("--pre", pre, "preprocessing: none | diff | diff:<d> | ar:<p>");
        app.add_option("--seed", seed, "random seed");
        app.add_option("--label-column", label_column, "auto | yes | no")
            ->check(CLI::IsMember({"auto", "yes", "no"}));
        app.add_option("--out", out, "output directory");
        if (detector_flags) {
            app.add_option("--detector", detector, "e-divisive | cvm | bartlett");
            app.add_option("--k", k, "number of change points");
            app.add_option("--min-segment", min_segment, "minimum segment length");
            app.add_option("--permutations", permutations, "permutation test size (e-divisive)");
            app.add_option("--index-offset", index_offset, "shift added to reported indices");
            app.add_flag("--raw", raw, "detect on the raw series instead of the derived one");
        }
    }

    PipelineConfig resolve() const {
        PipelineConfig c;
        if (config) {
            json j;
            try {
                j = json::parse(io::read_file(*config));
            } catch (const json::parse_error& e) {
                throw ParseError(*config + ": " + e.what());
            }
            c = io::config_from_json(j);
        }
        if (window) c.window = *window;
        if (pca) c.pca_m = *pca;
        if (detector) c.detector.detector = parse_detector(*detector);
        if (k) c.detector.k = *k;
        if (min_segment) c.detector.min_segment = *min_segment;
        if (pre) c.pre = Preprocessing::parse(*pre);
        if (seed) c.seed = *seed;
        if (permutations) c.detector.permutations = *permutations;
        if (index_offset) c.index_offset = *index_offset;
        if (raw) c.use_tda = false;
        return c;
    }

    io::CsvOptions csv_options() const {
        io::CsvOptions o;
        o.label_column = label_column == "yes"  ? io::LabelColumn::present
                         : label_column == "no" ? io::LabelColumn::absent
                                                : io::LabelColumn::detect;
        return o;
    }
};

inline std::uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

/// Fills in a missing seed and announces it so the run can be repeated.
inline std::uint64_t ensure_seed(PipelineConfig& cfg, std::ostream& err) {
    if (!cfg.seed) {
        cfg.seed = fresh_seed();
        err << "seed: " << *cfg.seed << '\n';
    }
    return *cfg.seed;
}

inline json series_json(const TimeSeries& s) {
    const auto d = s.data();
    return json{{"dim", s.dim()}, {"values", std::vector<double>(d.begin(), d.end())}};
}

inline TimeSeries series_from(const json& j) {
    return TimeSeries(j.at("values").get<std::vector<double>>(), j.at("dim").get<std::size_t>());
}

inline void provenance(io::CsvWriter& w, const PipelineConfig& cfg) {
    w.comment("tdacpd", kVersion);
    w.comment("config", io::config_to_json(cfg).dump());
    w.comment("seed", cfg.seed ? std::to_string(*cfg.seed) : "none");
}

inline std::vector<std::string> coordinate_names(const char* prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) {
        out.push_back(prefix + std::to_string(i));
    }
    return out;
}

inline int run_detect(const PipelineFlags& f, std::ostream& out, std::ostream& err) {
    PipelineConfig cfg = f.resolve();
    ensure_seed(cfg, err);
    const auto in = io::ingest_csv(f.input, f.csv_options());
    const DetectReport rep = detect(in.series, cfg);

    io::CsvWriter w;
    provenance(w, rep.config);
    w.comment("input", f.input);
    w.row("rank", "index", "original_index", "label", "statistic", "p_value");
    json cps = json::array();
    for (std::size_t i = 0; i < rep.result.change_points.size(); ++i) {
        const auto orig = rep.original_indices[i];
        const auto label = label_for(orig, in.labels);
        const double p = rep.result.p_values.empty() ? -1.0 : rep.result.p_values[i];
        w.row(i + 1, rep.result.change_points[i], orig, label, rep.result.statistics[i], p);
        cps.push_back({{"index", rep.result.change_points[i]},
                       {"original_index", orig},
                       {"label", label},
                       {"statistic", rep.result.statistics[i]},
                       {"p_value", p}});
    }

    json art;
    art["kind"] = "detect";
    art["tdacpd"] = kVersion;
    art["config"] = io::config_to_json(rep.config);
    art["seed"] = *rep.config.seed;
    art["input"] = f.input;
    art["labels"] = in.labels;
    art["value_columns"] = in.value_columns;
    art["series"] = series_json(in.series);
    art["preprocessing_offset"] = rep.processed.offset;
    art["series_kind"] = std::string(to_string(rep.result.series_kind));
    art["detector"] = std::string(to_string(rep.result.detector));
    art["change_points"] = cps;
    art["warnings"] = rep.result.warnings;
    if (rep.tda) {
        json rows = json::array();
        std::vector<std::size_t> origins;
        for (std::size_t i = 0; i < rep.tda->betti.rows(); ++i) {
            const auto r = rep.tda->betti.row(i);
            rows.push_back(r.counts);
            origins.push_back(r.window_origin);
        }
        art["derived"] = series_json(rep.tda->derived.values);
        art["betti"] = {{"scales", rep.tda->derived.grid}, {"origins", origins}, {"rows", rows}};
        art["window"] = rep.tda->derived.window;
    }

    const fs::path dir(f.out);
    io::write_atomic(dir / "detection.csv", w.str());
    io::write_atomic(dir / "detect_artifact.json", art.dump(1));
    for (const auto& warn : rep.result.warnings) {
        err << "warning: " << warn << '\n';
    }
    out << w.str();
    return 0;
}

inline int run_transform(const PipelineFlags& f, std::ostream& out, std::ostream& err) {
    PipelineConfig cfg = f.resolve();
    ensure_seed(cfg, err);
    const auto in = io::ingest_csv(f.input, f.csv_options());
    const OffsetSeries processed = preprocess(in.series, cfg.pre);
    cfg.window = cfg.resolved_window(processed.series.length());
    const auto tda = tda_transform_detailed(processed.series, *cfg.window, cfg.grid, cfg.pca_m);

    io::CsvWriter w;
    provenance(w, cfg);
    w.comment("input", f.input);
    std::vector<std::string> header{"window_origin", "original_index", "label"};
    const std::size_t m = tda.derived.values.dim();
    for (auto& c : coordinate_names("pc", m)) header.push_back(c);
    w.row(header);
    for (std::size_t i = 0; i < tda.derived.values.length(); ++i) {
        const auto origin = tda.betti.row(i).window_origin;
        const auto orig = map_to_original(origin, processed.offset, cfg.index_offset, in.series.length());
        std::vector<std::string> cells{std::to_string(origin), std::to_string(orig), label_for(orig, in.labels)};
        for (std::size_t j = 0; j < m; ++j) cells.push_back(io::format_double(tda.derived.values.at(i, j)));
        w.row(cells);
    }
    io::write_atomic(fs::path(f.out) / "derived_series.csv", w.str());
    if (tda.pca.rank_deficient) {
        err << "warning: PCA rank " << tda.pca.rank << " below requested dimension\n";
    }
    out << "wrote " << (fs::path(f.out) / "derived_series.csv").string() << " (" << tda.derived.values.length()
        << " rows)\n";
    return 0;
}

struct BenchmarkFlags {
    std::optional<std::string> preset;
    std::optional<std::string> sweep;
    std::optional<std::size_t> replications;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> min_segment;
    std::vector<std::size_t> windows;
    std::vector<std::size_t> pca;
    std::vector<std::string> detectors;
    std::string out = ".";
};

inline std::string slug(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!out.empty() && out.back() != '_') {
            out += '_';
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "scenario" : out;
}

inline int run_benchmark(const BenchmarkFlags& f, std::ostream& out, std::ostream& err) {
    if (f.preset.has_value() == f.sweep.has_value()) {
        throw InvalidInput("benchmark needs exactly one of --preset or --sweep");
    }
    SweepSpec spec;
    bool seeded = false;
    if (f.preset) {
        spec = presets::by_name(*f.preset, 200, 0);
    } else {
        json j;
        try {
            j = json::parse(io::read_file(*f.sweep));
        } catch (const json::parse_error& e) {
            throw ParseError(*f.sweep + ": " + e.what());
        }
        spec = io::sweep_from_json(j);
        seeded = j.contains("seed");
    }
    if (f.replications) spec.replications = *f.replications;
    if (f.threads) spec.threads = *f.threads;
    if (f.min_segment) spec.min_segment = *f.min_segment;
    if (!f.windows.empty()) {
        spec.windows = f.windows;
        spec.window_percents.clear();
    }
    if (!f.pca.empty()) spec.pca = f.pca;
    if (!f.detectors.empty()) {
        spec.detectors.clear();
        for (const auto& d : f.detectors) spec.detectors.push_back(parse_detector(d));
    }
    if (f.seed) {
        spec.seed = *f.seed;
    } else if (!seeded) {
        spec.seed = fresh_seed();
        err << "seed: " << spec.seed << '\n';
    }

    const auto rows = run_sweep(spec);
    const fs::path dir(f.out);
    for (const auto& sc : spec.scenarios) {
        std::vector<SweepRow> mine;
        for (const auto& r : rows) {
            if (r.scenario == sc.name) mine.push_back(r);
        }
        io::write_atomic(dir / (spec.name + "_" + slug(sc.name) + ".csv"), io::format_sweep(spec, mine));
    }
    const std::string combined = io::format_sweep(spec, rows);
    io::write_atomic(dir / (spec.name + ".csv"), combined);
    out << combined;
    return 0;
}

struct PlotFlags {
    std::string artifact;
    std::optional<std::size_t> split;
    std::string out = ".";
};

/// Per-window Betti rows labeled by side of `split` (1-based original index).
inline std::string betti_curves(const json& art, std::size_t split, std::size_t offset) {
    const auto scales = art.at("betti").at("scales").get<std::vector<double>>();
    const auto origins = art.at("betti").at("origins").get<std::vector<std::size_t>>();
    const auto& rows = art.at("betti").at("rows");
    io::CsvWriter w;
    w.comment("config", art.at("config").dump());
    w.comment("seed", std::to_string(art.at("seed").get<std::uint64_t>()));
    w.comment("split", std::to_string(split));
    std::vector<std::string> header{"window_origin", "side"};
    for (std::size_t i = 0; i < scales.size(); ++i) {
        header.push_back("eps_" + io::format_double(scales[i]));
    }
    w.row(header);
    for (std::size_t i = 0; i < origins.size(); ++i) {
        std::vector<std::string> cells{std::to_string(origins[i]),
                                       origins[i] + offset < split ? "before" : "after"};
        for (const auto& c : rows[i]) cells.push_back(std::to_string(c.get<std::size_t>()));
        w.row(cells);
    }
    return w.str();
}

inline int run_plot_data(const PlotFlags& f, std::ostream& out, std::ostream&) {
    if (!fs::exists(f.artifact)) {
        throw InvalidInput("artifact '" + f.artifact + "' does not exist");
    }
    const fs::path dir(f.out);
    const std::string text = io::read_file(f.artifact);
    if (fs::path(f.artifact).extension() == ".csv") {
        // A benchmark report is already the MAE table.
        bool is_sweep = false;
        for (const auto& [key, value] : io::read_provenance(text)) {
            is_sweep = is_sweep || key == "sweep";
        }
        if (!is_sweep) {
            throw InvalidInput("'" + f.artifact + "' is not a benchmark report");
        }
        io::write_atomic(dir / "mae_table.csv", text);
        out << "wrote " << (dir / "mae_table.csv").string() << '\n';
        return 0;
    }
    json art;
    try {
        art = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(f.artifact + ": " + e.what());
    }
    if (art.value("kind", "") != "detect") {
        throw InvalidInput("'" + f.artifact + "' is not a detect artifact");
    }
    const TimeSeries series = series_from(art.at("series"));
    const auto labels = art.at("labels").get<std::vector<std::string>>();
    const auto offset = art.at("preprocessing_offset").get<std::size_t>();
    std::vector<std::size_t> cps;
    for (const auto& c : art.at("change_points")) cps.push_back(c.at("original_index").get<std::size_t>());
    std::vector<std::size_t> derived_cps;
    for (const auto& c : art.at("change_points")) derived_cps.push_back(c.at("index").get<std::size_t>());

    // Segment means on the original timeline.
    const std::size_t T = series.length();
    const std::size_t d = series.dim();
    std::vector<std::size_t> bounds{1};
    for (auto c : cps) bounds.push_back(c);
    bounds.push_back(T + 1);
    std::vector<std::vector<double>> means(T, std::vector<double>(d, 0.0));
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        const std::size_t lo = bounds[s], hi = bounds[s + 1];
        if (hi <= lo) continue;
        for (std::size_t j = 0; j < d; ++j) {
            double sum = 0.0;
            for (std::size_t t = lo; t < hi; ++t) sum += series.at(t - 1, j);
            for (std::size_t t = lo; t < hi; ++t) means[t - 1][j] = sum / static_cast<double>(hi - lo);
        }
    }
    auto is_change = [](const std::vector<std::size_t>& v, std::size_t t) {
        return std::find(v.begin(), v.end(), t) != v.end() ? "1" : "0";
    };

    io::CsvWriter orig;
    orig.comment("config", art.at("config").dump());
    orig.comment("seed", std::to_string(art.at("seed").get<std::uint64_t>()));
    std::vector<std::string> header{"t", "label"};
    const auto names = art.at("value_columns").get<std::vector<std::string>>();
    for (const auto& n : names) header.push_back(n);
    for (const auto& n : names) header.push_back(n + "_segment_mean");
    header.push_back("change_point");
    orig.row(header);
    for (std::size_t t = 1; t <= T; ++t) {
        std::vector<std::string> cells{std::to_string(t), label_for(t, labels)};
        for (std::size_t j = 0; j < d; ++j) cells.push_back(io::format_double(series.at(t - 1, j)));
        for (std::size_t j = 0; j < d; ++j) cells.push_back(io::format_double(means[t - 1][j]));
        cells.push_back(is_change(cps, t));
        orig.row(cells);
    }
    io::write_atomic(dir / "original_series.csv", orig.str());
    out << "wrote " << (dir / "original_series.csv").string() << '\n';

    if (!art.contains("derived")) {
        return 0;   // raw-series detection has nothing else to plot
    }
    const TimeSeries derived = series_from(art.at("derived"));
    const auto origins = art.at("betti").at("origins").get<std::vector<std::size_t>>();
    io::CsvWriter der;
    der.comment("config", art.at("config").dump());
    der.comment("seed", std::to_string(art.at("seed").get<std::uint64_t>()));
    std::vector<std::string> dh{"window_origin", "original_index"};
    for (auto& c : coordinate_names("pc", derived.dim())) dh.push_back(c);
    dh.push_back("change_point");
    der.row(dh);
    for (std::size_t i = 0; i < derived.length(); ++i) {
        std::vector<std::string> cells{std::to_string(origins[i]), std::to_string(origins[i] + offset)};
        for (std::size_t j = 0; j < derived.dim(); ++j) cells.push_back(io::format_double(derived.at(i, j)));
        cells.push_back(is_change(derived_cps, origins[i]));
        der.row(cells);
    }
    io::write_atomic(dir / "derived_series.csv", der.str());

    std::size_t split = f.split ? *f.split : (cps.empty() ? T / 2 + 1 : cps.front());
    io::write_atomic(dir / "betti_curves.csv", betti_curves(art, split, offset));
    out << "wrote " << (dir / "derived_series.csv").string() << '\n'
        << "wrote " << (dir / "betti_curves.csv").string() << '\n';
    return 0;
}

/// Machine-readable failure line: one JSON object on stderr.
inline void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const InvalidInput*>(&e) ||
        dynamic_cast<const InvalidSpec*>(&e)) {
        return 3;
    }
    if (dynamic_cast<const Unsupported*>(&e)) {
        return 4;
    }
    return 1;
}

inline std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const InvalidWindow*>(&e)) return "invalid_window";
    if (dynamic_cast<const InvalidInput*>(&e)) return "invalid_input";
    if (dynamic_cast<const ParseError*>(&e)) return "parse_error";
    if (dynamic_cast<const InvalidSpec*>(&e)) return "invalid_spec";
    if (dynamic_cast<const Unsupported*>(&e)) return "unsupported";
    if (dynamic_cast<const FitError*>(&e)) return "fit_error";
    return "error";
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Topological change point detection", "tdacpd"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    PipelineFlags det, tr;
    auto* detect_cmd = app.add_subcommand("detect", "detect change points in a CSV series");
    det.add_to(*detect_cmd, true);
    auto* transform_cmd = app.add_subcommand("transform", "emit the derived topological series");
    tr.add_to(*transform_cmd, false);

    BenchmarkFlags bf;
    auto* bench_cmd = app.add_subcommand("benchmark", "Monte Carlo sweep over simulated scenarios");
    bench_cmd->add_option("--preset", bf.preset, "table1 | table2");
    bench_cmd->add_option("--sweep", bf.sweep, "JSON sweep file");
    bench_cmd->add_option("--replications,-R", bf.replications, "replications per cell");
    bench_cmd->add_option("--seed", bf.seed, "random seed");
    bench_cmd->add_option("--threads", bf.threads, "worker threads");
    bench_cmd->add_option("--min-segment", bf.min_segment, "minimum segment length");
    bench_cmd->add_option("--window", bf.windows, "window sizes (repeatable)");
    bench_cmd->add_option("--pca", bf.pca, "PCA sizes (repeatable)");
    bench_cmd->add_option("--detector", bf.detectors, "detectors (repeatable)");
    bench_cmd->add_option("--out", bf.out, "output directory");

    PlotFlags pf;
    auto* plot_cmd = app.add_subcommand("plot-data", "plot-ready CSVs from a detect or benchmark artifact");
    plot_cmd->add_option("artifact", pf.artifact, "detect_artifact.json or benchmark CSV")->required();
    plot_cmd->add_option("--split", pf.split, "original index splitting the Betti curves");
    plot_cmd->add_option("--out", pf.out, "output directory");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);   // --help, --version
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return 2;
    }

    try {
        if (*detect_cmd) return run_detect(det, out, err);
        if (*transform_cmd) return run_transform(tr, out, err);
        if (*bench_cmd) return run_benchmark(bf, out, err);
        if (*plot_cmd) return run_plot_data(pf, out, err);
    } catch (const Error& e) {
        report_error(err, error_kind(e), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        report_error(err, "error", e.what());
        return 1;
    }
    return 1;
}

} // namespace tdacpd::cli
