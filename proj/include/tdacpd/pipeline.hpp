#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tdacpd/bartlett.hpp"
#include "tdacpd/cvm.hpp"
#include "tdacpd/detection.hpp"
#include "tdacpd/embedding.hpp"
#include "tdacpd/energy.hpp"
#include "tdacpd/error.hpp"
#include "tdacpd/prewhiten.hpp"
#include "tdacpd/series.hpp"
#include "tdacpd/topology.hpp"

namespace tdacpd {

struct Preprocessing {
    enum class Kind { none, difference, ar };
    Kind kind = Kind::none;
    std::size_t order = 0;   // differencing order or AR order

    /// Accepts "none", "diff", "diff:<order>", "ar:<p>".
    static Preprocessing parse(std::string_view text) {
        auto number = [&](std::string_view digits) -> std::size_t {
            if (digits.empty() ||
                !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
                throw ParseError("invalid preprocessing order in '" + std::string(text) + "'");
            }
            return static_cast<std::size_t>(std::stoul(std::string(digits)));
        };
        if (text == "none") {
            return {};
        }
        if (text == "diff") {
            return {Kind::difference, 1};
        }
        if (text.starts_with("diff:")) {
            return {Kind::difference, number(text.substr(5))};
        }
        if (text.starts_with("ar:")) {
            return {Kind::ar, number(text.substr(3))};
        }
        throw ParseError("unknown preprocessing '" + std::string(text) +
                         "' (expected none, diff, diff:<order> or ar:<p>)");
    }

    std::string to_string() const {
        switch (kind) {
        case Kind::none:
            return "none";
        case Kind::difference:
            return order == 1 ? "diff" : "diff:" + std::to_string(order);
        case Kind::ar:
            return "ar:" + std::to_string(order);
        }
        return "none";
    }

    friend bool operator==(const Preprocessing&, const Preprocessing&) = default;
};

inline OffsetSeries preprocess(const TimeSeries& series, const Preprocessing& pre) {
    switch (pre.kind) {
    case Preprocessing::Kind::none:
        return OffsetSeries{series, 0};
    case Preprocessing::Kind::difference:
        return difference(series, pre.order);
    case Preprocessing::Kind::ar:
        return ar_residuals(series, fit_ar(series, pre.order));
    }
    return OffsetSeries{series, 0};
}

/// Everything a detector needs besides the series.
struct DetectorSettings {
    Detector detector = Detector::e_divisive;
    std::size_t min_segment = 30;
    std::size_t k = 1;
    double alpha = 1.0;
    SplitSearch energy_search = SplitSearch::bounded;
    std::size_t permutations = 0;        // e-divisive significance testing
    std::size_t cvm_permutations = 500;  // CvM null moments under ties
    std::uint64_t seed = 0;
};

inline DetectionResult run_detector(const TimeSeries& series, const DetectorSettings& s,
                                    SeriesKind kind) {
    if (univariate_only(s.detector) && s.k != 1) {
        throw Unsupported(std::string(to_string(s.detector)) +
                          " locates a single change point; k must be 1");
    }
    DetectionResult r;
    switch (s.detector) {
    case Detector::e_divisive: {
        EnergyConfig cfg;
        cfg.alpha = s.alpha;
        cfg.search = s.energy_search;
        cfg.min_segment = s.min_segment;
        cfg.k = s.k;
        cfg.permutations = s.permutations;
        cfg.seed = s.seed;
        r = e_divisive(series, cfg);
        break;
    }
    case Detector::cvm: {
        CvmConfig cfg;
        cfg.min_segment = s.min_segment;
        cfg.permutations = s.cvm_permutations;
        cfg.seed = s.seed;
        r = cvm_single_change(series, cfg);
        break;
    }
    case Detector::bartlett:
        r = bartlett_single_change(series, s.min_segment);
        break;
    }
    r.series_kind = kind;
    return r;
}

/// Resolved tuning parameters of one detection run.
struct PipelineConfig {
    std::optional<std::size_t> window;   // default: max(5, round(0.05 T))
    ScaleGrid grid = ScaleGrid::standard();
    std::size_t pca_m = 3;
    bool use_tda = true;
    DetectorSettings detector;
    Preprocessing pre;
    /// Added to mapped indices; 0 reports derived indices directly.
    long index_offset = 0;
    std::optional<std::uint64_t> seed;

    std::size_t resolved_window(std::size_t length) const {
        if (window) {
            return *window;
        }
        const auto five_percent = static_cast<std::size_t>(std::lround(0.05 * static_cast<double>(length)));
        return std::max<std::size_t>(5, five_percent);
    }

    /// Univariate-only detectors run on a one-coordinate derived series.
    std::size_t effective_pca_m() const {
        return univariate_only(detector.detector) ? 1 : pca_m;
    }
};

/// Maps a 1-based detector index back to the 1-based original timeline:
/// index + preprocessing offset + configured extra offset, clamped to [1, length].
inline std::size_t map_to_original(std::size_t detector_index, std::size_t pre_offset,
                                   long index_offset, std::size_t original_length) {
    const long raw = static_cast<long>(detector_index) + static_cast<long>(pre_offset) + index_offset;
    const long hi = static_cast<long>(original_length);
    return static_cast<std::size_t>(std::clamp(raw, 1L, std::max(hi, 1L)));
}

/// Label of a 1-based original index; falls back to the index itself.
inline std::string label_for(std::size_t original_index, const std::vector<std::string>& labels) {
    if (original_index >= 1 && original_index <= labels.size()) {
        return labels[original_index - 1];
    }
    return std::to_string(original_index);
}

struct DetectReport {
    PipelineConfig config;                     // window resolved
    DetectionResult result;                    // indices on the detector's series
    std::vector<std::size_t> original_indices; // 1-based, original timeline
    OffsetSeries processed;
    std::optional<TdaArtifacts> tda;
};

/// Preprocess, optionally transform, detect, and map indices back.
inline DetectReport detect(const TimeSeries& series, PipelineConfig cfg) {
    if (cfg.seed) {
        cfg.detector.seed = *cfg.seed;
    }
    OffsetSeries processed = preprocess(series, cfg.pre);
    std::optional<TdaArtifacts> tda;
    DetectionResult result;
    if (cfg.use_tda) {
        cfg.window = cfg.resolved_window(processed.series.length());
        tda = tda_transform_detailed(processed.series, *cfg.window, cfg.grid, cfg.effective_pca_m());
        result = run_detector(tda->derived.values, cfg.detector, SeriesKind::tda_derived);
        if (tda->pca.rank_deficient) {
            result.warnings.push_back("PCA rank " + std::to_string(tda->pca.rank) +
                                      " below requested dimension");
        }
    } else {
        result = run_detector(processed.series, cfg.detector, SeriesKind::raw);
    }
    std::vector<std::size_t> mapped;
    mapped.reserve(result.change_points.size());
    for (auto idx : result.change_points) {
        mapped.push_back(map_to_original(idx, processed.offset, cfg.index_offset, series.length()));
    }
    return DetectReport{std::move(cfg), std::move(result), std::move(mapped), std::move(processed),
                        std::move(tda)};
}

} // namespace tdacpd
