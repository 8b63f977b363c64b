#pragma once

// Minimal RFC-4180 reader/writer. Quoted fields may contain commas, doubled
// quotes and line breaks; CRLF and LF line endings are both accepted.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ddosml/error.hpp"

namespace ddosml::csv {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads the next record into `fields`. Returns false at end of input.
    /// A trailing blank line is not a record.
    bool next(std::vector<std::string>& fields) {
        fields.clear();
        std::string line;
        if (!std::getline(in_, line)) return false;
        ++line_;
        record_line_ = line_;
        if (strip_cr(line).empty() && in_.peek() == std::char_traits<char>::eof()) return false;

        std::string field;
        bool quoted = false;
        bool after_quote = false;
        for (;;) {
            for (std::size_t i = 0; i < line.size(); ++i) {
                const char c = line[i];
                if (quoted) {
                    if (c == '"') {
                        if (i + 1 < line.size() && line[i + 1] == '"') {
                            field.push_back('"');
                            ++i;
                        } else {
                            quoted = false;
                            after_quote = true;
                        }
                    } else {
                        field.push_back(c);
                    }
                } else if (c == ',') {
                    fields.push_back(std::move(field));
                    field.clear();
                    after_quote = false;
                } else if (c == '"' && field.empty() && !after_quote) {
                    quoted = true;
                } else {
                    field.push_back(c);
                }
            }
            if (!quoted) break;
            // Line break inside a quoted field.
            if (!std::getline(in_, line)) throw RowError(record_line_, "unterminated quoted field");
            ++line_;
            strip_cr(line);
            field.push_back('\n');
        }
        fields.push_back(std::move(field));
        return true;
    }

    /// Physical line on which the last record started (1-based).
    std::size_t record_line() const noexcept { return record_line_; }

private:
    static std::string& strip_cr(std::string& line) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    std::istream& in_;
    std::size_t line_ = 0;
    std::size_t record_line_ = 0;
};

inline bool needs_quoting(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void write_field(std::ostream& out, std::string_view field) {
    if (!needs_quoting(field)) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

inline void write_record(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        write_field(out, fields[i]);
    }
    out << '\n';
}

/// Shortest text that parses back to exactly `v`. Non-finite values use the
/// CICFlowMeter spellings so they survive a re-parse.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

/// Parses a numeric cell. Accepts the case-sensitive tokens "Infinity",
/// "-Infinity" and "NaN"; surrounding whitespace is ignored. Returns nullopt
/// for text and for empty cells.
inline std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    if (cell == "Infinity" || cell == "+Infinity") return std::numeric_limits<double>::infinity();
    if (cell == "-Infinity") return -std::numeric_limits<double>::infinity();
    if (cell == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec == std::errc::result_out_of_range) {
        // from_chars leaves v untouched on overflow and underflow.
        if (ptr != cell.data() + cell.size()) return std::nullopt;
        return std::strtod(std::string(cell).c_str(), nullptr);
    }
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    if (std::isnan(v) || std::isinf(v)) return std::nullopt;  // "nan"/"inf" spellings are text
    return v;
}

}  // namespace ddosml::csv
