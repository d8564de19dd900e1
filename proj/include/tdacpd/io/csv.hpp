#pragma once

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "tdacpd/error.hpp"
#include "tdacpd/series.hpp"

namespace tdacpd::io {

enum class LabelColumn {
    detect,   // leading column is a label when its header names a time axis
              // or any of its cells is non-numeric
    present,
    absent,
};

struct CsvOptions {
    LabelColumn label_column = LabelColumn::detect;
    char delimiter = ',';
};

/// A series read from CSV together with its row labels (e.g. years).
struct LabeledSeries {
    TimeSeries series;
    std::vector<std::string> labels;        // empty when there is no label column
    std::vector<std::string> value_columns;
    std::string label_name;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(delim, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end != begin + cell.size() || errno == ERANGE) {
        return std::nullopt;
    }
    return v;
}

inline bool names_time_axis(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const char* known : {"t", "time", "year", "date", "label", "index", "period", "month", "day"}) {
        if (name == known) {
            return true;
        }
    }
    return false;
}

} // namespace detail

/// Parses a header row plus one row per time step. Blank lines and lines
/// starting with '#' are ignored. `source` names the input in error messages.
inline LabeledSeries parse_csv(std::istream& in, const CsvOptions& opts = {},
                               const std::string& source = "<input>") {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = detail::trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        auto fields = detail::split(view, opts.delimiter);
        if (header.empty()) {
            header = std::move(fields);
            continue;
        }
        if (fields.size() != header.size()) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": ragged row with " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        }
        rows.push_back(std::move(fields));
        line_numbers.push_back(line_no);
    }
    if (header.empty()) {
        throw ParseError(source + ": missing header row");
    }
    if (rows.empty()) {
        throw ParseError(source + ": no data rows");
    }

    bool has_label = false;
    switch (opts.label_column) {
    case LabelColumn::present:
        has_label = true;
        break;
    case LabelColumn::absent:
        has_label = false;
        break;
    case LabelColumn::detect:
        if (header.size() > 1) {
            has_label = detail::names_time_axis(header.front()) ||
                        std::any_of(rows.begin(), rows.end(), [](const auto& r) {
                            return !r.front().empty() && !detail::parse_number(r.front());
                        });
        }
        break;
    }
    const std::size_t first_value = has_label ? 1 : 0;
    if (header.size() <= first_value) {
        throw ParseError(source + ": no value columns");
    }

    std::vector<std::string> labels;
    const std::size_t dim = header.size() - first_value;
    std::vector<double> values;
    values.reserve(rows.size() * dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (has_label) {
            labels.push_back(rows[r].front());
        }
        for (std::size_t c = first_value; c < header.size(); ++c) {
            const std::string& cell = rows[r][c];
            const std::string where = source + ":" + std::to_string(line_numbers[r]) + ", column '" +
                                      header[c] + "'";
            if (cell.empty()) {
                throw ParseError(where + ": missing value");
            }
            const auto v = detail::parse_number(cell);
            if (!v || !std::isfinite(*v)) {
                throw ParseError(where + ": non-numeric value '" + cell + "'");
            }
            values.push_back(*v);
        }
    }
    return LabeledSeries{
        TimeSeries(std::move(values), dim), std::move(labels),
        std::vector<std::string>(header.begin() + static_cast<std::ptrdiff_t>(first_value), header.end()),
        has_label ? header.front() : std::string{}};
}

inline LabeledSeries ingest_csv(const std::filesystem::path& path, const CsvOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "' for reading");
    }
    return parse_csv(in, opts, path.string());
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    std::string s = os.str();
    // Prefer the short form when it round-trips.
    for (int p = 1; p < std::numeric_limits<double>::max_digits10; ++p) {
        std::ostringstream shorter;
        shorter << std::setprecision(p) << v;
        if (std::strtod(shorter.str().c_str(), nullptr) == v) {
            return shorter.str();
        }
    }
    return s;
}

/// Builds a comma-separated table with leading '#' provenance lines.
class CsvWriter {
public:
    void comment(std::string_view key, std::string_view value) {
        out_ << "# " << key << ": " << value << '\n';
    }

    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((write_cell(cells, first)), ...);
        out_ << '\n';
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                out_ << ',';
            }
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    template <typename T>
    void write_cell(const T& v, bool& first) {
        if (!first) {
            out_ << ',';
        }
        first = false;
        if constexpr (std::is_floating_point_v<T>) {
            out_ << format_double(v);
        } else {
            out_ << v;
        }
    }

    std::ostringstream out_;
};

/// Writes to a sibling temporary file, then renames over the target.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw Error("failed writing '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Values of "# key: value" provenance lines, in file order.
inline std::vector<std::pair<std::string, std::string>> read_provenance(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.starts_with("# ")) {
            continue;
        }
        const auto colon = line.find(": ", 2);
        if (colon == std::string::npos) {
            continue;
        }
        out.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
    }
    return out;
}

} // namespace tdacpd::io
