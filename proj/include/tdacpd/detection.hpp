#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdacpd/error.hpp"

namespace tdacpd {

enum class SeriesKind { raw, tda_derived };

enum class Detector { e_divisive, cvm, bartlett };

inline std::string_view to_string(SeriesKind k) noexcept {
    return k == SeriesKind::raw ? "raw" : "tda";
}

inline std::string_view to_string(Detector d) noexcept {
    switch (d) {
    case Detector::e_divisive:
        return "e-divisive";
    case Detector::cvm:
        return "cvm";
    case Detector::bartlett:
        return "bartlett";
    }
    return "unknown";
}

inline Detector parse_detector(std::string_view s) {
    if (s == "e-divisive" || s == "edivisive" || s == "e_divisive") {
        return Detector::e_divisive;
    }
    if (s == "cvm") {
        return Detector::cvm;
    }
    if (s == "bartlett") {
        return Detector::bartlett;
    }
    throw ParseError("unknown detector '" + std::string(s) +
                     "' (expected e-divisive, cvm or bartlett)");
}

/// True for detectors defined only on univariate series.
constexpr bool univariate_only(Detector d) noexcept { return d != Detector::e_divisive; }

/// Change point estimates in the index system of the series the detector ran on.
///
/// Each index is 1-based and names the first observation of the new regime.
/// `statistics[i]` is the statistic that selected `change_points[i]`.
struct DetectionResult {
    std::vector<std::size_t> change_points;
    std::vector<double> statistics;
    std::vector<double> p_values;   // empty unless permutation testing ran
    SeriesKind series_kind = SeriesKind::raw;
    Detector detector = Detector::e_divisive;
    std::vector<std::string> warnings;

    friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

/// Admissible 1-based split range [first, last] when both sides need at
/// least `min_segment` observations.
struct SplitRange {
    std::size_t first;
    std::size_t last;
};

inline SplitRange admissible_splits(std::size_t length, std::size_t min_segment) {
    if (min_segment == 0 || length < 2 * min_segment) {
        throw InvalidInput("series of length " + std::to_string(length) +
                           " is too short for two segments of at least " +
                           std::to_string(min_segment) + " observations");
    }
    return SplitRange{min_segment + 1, length - min_segment + 1};
}

} // namespace tdacpd
