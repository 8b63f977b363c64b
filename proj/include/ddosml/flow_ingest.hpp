#pragma once

// CICDDoS2019-style flow CSV ingestion: parse, clean, encode labels, split,
// standardize.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ddosml/csv.hpp"
#include "ddosml/dataset.hpp"
#include "ddosml/error.hpp"
#include "ddosml/random.hpp"

namespace ddosml {

struct ColumnSchema {
    std::vector<std::string> names;  // trimmed, unique
    std::string label_column = "Label";
    std::vector<bool> numeric_mask;  // filled in by the parser

    std::size_t label_index() const {
        auto it = std::find(names.begin(), names.end(), label_column);
        if (it == names.end()) throw SchemaError("label column '" + label_column + "' not in header");
        return static_cast<std::size_t>(it - names.begin());
    }
};

/// Keeps every row of a label by default; a cap turns that label into a
/// seeded reservoir of at most `cap` rows.
struct RowSampler {
    std::map<std::string, std::size_t> caps;  // canonical label -> max rows
    std::uint64_t seed = 0;
    std::map<std::string, std::string> aliases = LabelDictionary::default_aliases();
};

struct ParseOptions {
    std::string label_column = "Label";
    std::optional<std::vector<std::string>> expected_columns;
    std::optional<RowSampler> sampler;
    bool require_label = true;  // predict inputs have no label column
};

/// Parsed but uncleaned flows. Every feature cell is kept as a double (NaN
/// for text and empty cells) together with the raw field text, which the
/// cleaning stage needs for text-like columns.
struct RawFlowTable {
    ColumnSchema schema;
    std::vector<std::string> feature_names;
    Matrix values;
    std::vector<std::string> raw_labels;
    std::vector<std::size_t> line_numbers;
    std::vector<std::size_t> text_cells;     // per feature: non-numeric, non-empty cells
    std::vector<std::size_t> missing_cells;  // per feature: empty cells
    std::vector<std::size_t> special_cells;  // per feature: NaN / +-Infinity cells
    std::string source;

    std::size_t rows() const noexcept { return values.rows(); }

    std::string_view cell_text(std::size_t row, std::size_t feature) const {
        std::string_view text = row_text_[row];
        for (std::size_t i = 0; i < feature; ++i) text.remove_prefix(text.find(kSep) + 1);
        return text.substr(0, text.find(kSep));
    }

    bool is_missing(std::size_t row, std::size_t feature) const { return csv::trim(cell_text(row, feature)).empty(); }

    void add_row(std::span<const double> values_row, std::string joined_text, std::string label, std::size_t line) {
        values.append_row(values_row);
        row_text_.push_back(std::move(joined_text));
        raw_labels.push_back(std::move(label));
        line_numbers.push_back(line);
    }

    void replace_row(std::size_t slot, std::span<const double> values_row, std::string joined_text, std::string label,
                     std::size_t line) {
        std::copy(values_row.begin(), values_row.end(), values.row(slot).begin());
        row_text_[slot] = std::move(joined_text);
        raw_labels[slot] = std::move(label);
        line_numbers[slot] = line;
    }

    /// Reorders rows by `order` (a permutation of row indices).
    void permute(const std::vector<std::size_t>& order) {
        Matrix v(order.size(), values.cols());
        std::vector<std::string> text, labels;
        std::vector<std::size_t> lines;
        for (std::size_t i = 0; i < order.size(); ++i) {
            std::copy(values.row(order[i]).begin(), values.row(order[i]).end(), v.row(i).begin());
            text.push_back(std::move(row_text_[order[i]]));
            labels.push_back(std::move(raw_labels[order[i]]));
            lines.push_back(line_numbers[order[i]]);
        }
        values = std::move(v);
        row_text_ = std::move(text);
        raw_labels = std::move(labels);
        line_numbers = std::move(lines);
    }

    static constexpr char kSep = '\x1f';

private:
    std::vector<std::string> row_text_;
};

namespace detail {

inline std::vector<std::string> unique_trimmed_header(const std::vector<std::string>& header) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const auto& raw : header) {
        std::string name(csv::trim(raw));
        if (name.empty()) throw SchemaError("empty column name in header");
        // Repeated names get ".1", ".2", ... appended.
        for (int k = 1; seen.count(name); ++k) name = std::string(csv::trim(raw)) + "." + std::to_string(k);
        seen.insert(name);
        names.push_back(std::move(name));
    }
    return names;
}

}  // namespace detail

/// Incremental flow CSV parser. Several files with the same header can be
/// fed in turn; a RowSampler's reservoirs span all of them. Non-numeric
/// cells are not errors: they are left for clean_dataset to encode.
class FlowCsvParser {
public:
    explicit FlowCsvParser(ParseOptions options = {}) : options_(std::move(options)) {
        if (options_.sampler) {
            for (const auto& [label, cap] : options_.sampler->caps) reservoirs_[label].cap = cap;
            rng_.emplace(options_.sampler->seed);
            resolver_ = LabelDictionary({}, options_.sampler->aliases);
        }
    }

    void feed(std::istream& in, const std::string& source = {}) {
        csv::Reader reader(in);
        std::vector<std::string> fields;
        if (!reader.next(fields)) throw SchemaError("missing header row" + where(source));
        auto names = detail::unique_trimmed_header(fields);
        if (!started_) {
            start(std::move(names));
        } else if (names != table_.schema.names) {
            throw SchemaError("header differs from the first input" + where(source));
        }
        if (!source.empty()) table_.source += (table_.source.empty() ? "" : ";") + source;

        const std::size_t width = table_.schema.names.size();
        const std::size_t n_features = table_.feature_names.size();
        std::vector<double> row(n_features);
        std::string joined;
        while (reader.next(fields)) {
            const std::size_t line = reader.record_line();
            if (fields.size() != width)
                throw RowError(line, "expected " + std::to_string(width) + " cells, found " +
                                         std::to_string(fields.size()) + where(source));
            std::string label = label_col_ ? std::string(csv::trim(fields[*label_col_])) : std::string();
            const std::size_t sequence = sequence_++;

            std::optional<std::size_t> replace_slot;
            Reservoir* reservoir = nullptr;
            if (!reservoirs_.empty()) {
                auto it = reservoirs_.find(resolver_.canonical(label));
                if (it != reservoirs_.end()) {
                    reservoir = &it->second;
                    const std::size_t seen = reservoir->seen++;
                    if (seen >= reservoir->cap) {
                        const auto j = static_cast<std::size_t>(rng_->below(seen + 1));
                        if (j >= reservoir->cap) continue;
                        replace_slot = reservoir->slots[j];
                    }
                }
            }

            joined.clear();
            for (std::size_t c = 0, f = 0; c < width; ++c) {
                if (c == label_col_) continue;
                if (f) joined.push_back(RawFlowTable::kSep);
                joined += fields[c];
                const auto value = csv::parse_number(fields[c]);
                row[f] = value ? *value : std::numeric_limits<double>::quiet_NaN();
                ++f;
            }
            if (replace_slot) {
                table_.replace_row(*replace_slot, row, joined, std::move(label), line);
                sequences_[*replace_slot] = sequence;
            } else {
                if (reservoir) reservoir->slots.push_back(table_.rows());
                table_.add_row(row, joined, std::move(label), line);
                sequences_.push_back(sequence);
            }
        }
    }

    RawFlowTable finish() {
        if (!started_) throw SchemaError("missing header row");
        if (!reservoirs_.empty()) {
            // Reservoir replacement scrambles row order; restore input order.
            std::vector<std::size_t> order(table_.rows());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sequences_[a] < sequences_[b]; });
            table_.permute(order);
        }
        const std::size_t n_features = table_.feature_names.size();
        table_.text_cells.assign(n_features, 0);
        table_.missing_cells.assign(n_features, 0);
        table_.special_cells.assign(n_features, 0);
        for (std::size_t r = 0; r < table_.rows(); ++r)
            for (std::size_t f = 0; f < n_features; ++f) {
                const double v = table_.values(r, f);
                if (std::isinf(v)) {
                    ++table_.special_cells[f];
                } else if (std::isnan(v)) {
                    const auto text = table_.cell_text(r, f);
                    if (csv::trim(text).empty()) ++table_.missing_cells[f];
                    else if (csv::parse_number(text)) ++table_.special_cells[f];
                    else ++table_.text_cells[f];
                }
            }
        const std::size_t width = table_.schema.names.size();
        table_.schema.numeric_mask.assign(width, false);
        for (std::size_t c = 0, f = 0; c < width; ++c) {
            if (c == label_col_) continue;
            table_.schema.numeric_mask[c] = table_.text_cells[f++] == 0;
        }
        return std::move(table_);
    }

private:
    struct Reservoir {
        std::size_t cap = 0;
        std::size_t seen = 0;
        std::vector<std::size_t> slots;  // table rows owned by this reservoir
    };

    static std::string where(const std::string& source) { return source.empty() ? "" : " (" + source + ")"; }

    void start(std::vector<std::string> names) {
        started_ = true;
        table_.schema.names = std::move(names);
        table_.schema.label_column = options_.label_column;
        if (options_.expected_columns && *options_.expected_columns != table_.schema.names)
            throw SchemaError("header does not match expected column schema");
        const auto& all = table_.schema.names;
        if (auto it = std::find(all.begin(), all.end(), options_.label_column); it != all.end())
            label_col_ = static_cast<std::size_t>(it - all.begin());
        else if (options_.require_label)
            throw SchemaError("label column '" + options_.label_column + "' not in header");
        for (std::size_t c = 0; c < all.size(); ++c)
            if (c != label_col_) table_.feature_names.push_back(all[c]);
        table_.values = Matrix(0, table_.feature_names.size());
    }

    ParseOptions options_;
    RawFlowTable table_;
    bool started_ = false;
    std::optional<std::size_t> label_col_;
    std::map<std::string, Reservoir> reservoirs_;
    std::optional<Rng> rng_;
    LabelDictionary resolver_;
    std::size_t sequence_ = 0;
    std::vector<std::size_t> sequences_;
};

/// Parses one flow CSV with a header row.
inline RawFlowTable parse_flow_csv(std::istream& in, const ParseOptions& options = {}) {
    FlowCsvParser parser(options);
    parser.feed(in);
    return parser.finish();
}

// --- cleaning ---------------------------------------------------------------

enum class ColumnEncoding { numeric, hash, timestamp };

inline std::string to_string(ColumnEncoding e) {
    switch (e) {
        case ColumnEncoding::numeric: return "numeric";
        case ColumnEncoding::hash: return "hash";
        case ColumnEncoding::timestamp: return "timestamp";
    }
    return "numeric";
}

inline ColumnEncoding column_encoding_from_string(std::string_view s) {
    if (s == "numeric") return ColumnEncoding::numeric;
    if (s == "hash") return ColumnEncoding::hash;
    if (s == "timestamp") return ColumnEncoding::timestamp;
    throw FormatError("unknown column encoding '" + std::string(s) + "'");
}

struct CleaningPolicy {
    enum class NonFinite { replace_zero, drop_row };
    enum class Text { hash, reject };
    enum class Duplicates { keep, drop };

    NonFinite non_finite = NonFinite::replace_zero;
    Text text = Text::hash;
    Duplicates duplicates = Duplicates::keep;
    bool timestamp_as_epoch = true;
    std::string timestamp_column = "Timestamp";
    /// Encodings fixed in advance (used when scoring new files with a model).
    std::map<std::string, ColumnEncoding> forced;
};

struct CleaningLogEntry {
    std::string column;
    std::size_t replaced = 0;
    std::string rule;
    bool operator==(const CleaningLogEntry&) const = default;
};

struct CleaningLog {
    std::vector<CleaningLogEntry> entries;
    std::size_t rows_dropped_nonfinite = 0;
    std::size_t rows_dropped_duplicate = 0;

    std::size_t total_replaced(std::string_view rule) const {
        std::size_t n = 0;
        for (const auto& e : entries)
            if (e.rule == rule) n += e.replaced;
        return n;
    }

    /// One JSON object per line: {"column":..,"replaced":..,"rule":..}.
    void write_jsonl(std::ostream& out) const;
};

/// Numeric features plus still-textual labels.
struct CleanedFlows {
    Matrix features;
    std::vector<std::string> feature_names;
    std::vector<std::string> raw_labels;
    std::vector<ColumnEncoding> encodings;
    CleaningLog log;
    std::string source;
};

/// 64-bit FNV-1a of the trimmed text, reduced modulo 2^32.
inline double hash_text(std::string_view text) {
    text = csv::trim(text);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return static_cast<double>(h & 0xffffffffULL);
}

/// Seconds since the Unix epoch (UTC) for "YYYY-MM-DD HH:MM:SS[.frac]" or
/// the same with a 'T' separator.
inline std::optional<double> parse_timestamp(std::string_view text) {
    text = csv::trim(text);
    auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        if (pos + len > text.size()) return std::nullopt;
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (text[i] < '0' || text[i] > '9') return std::nullopt;
            v = v * 10 + (text[i] - '0');
        }
        return v;
    };
    if (text.size() < 19 || text[4] != '-' || text[7] != '-' || (text[10] != ' ' && text[10] != 'T') ||
        text[13] != ':' || text[16] != ':')
        return std::nullopt;
    const auto y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2), h = digits(11, 2), mi = digits(14, 2),
               s = digits(17, 2);
    if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*mo)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *h > 23 || *mi > 59 || *s > 60) return std::nullopt;
    double frac = 0.0;
    if (text.size() > 19) {
        if (text[19] != '.' || text.size() == 20) return std::nullopt;
        double scale = 0.1;
        for (std::size_t i = 20; i < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9') return std::nullopt;
            frac += (text[i] - '0') * scale;
            scale /= 10.0;
        }
    }
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return static_cast<double>(days) * 86400.0 + *h * 3600.0 + *mi * 60.0 + *s + frac;
}

/// Turns a raw table into a finite numeric matrix. Text-like columns are
/// hashed (or timestamp-parsed), non-finite and empty cells follow
/// `policy.non_finite`.
inline CleanedFlows clean_dataset(const RawFlowTable& raw, const CleaningPolicy& policy = {}) {
    const std::size_t n_features = raw.feature_names.size();
    CleanedFlows out;
    out.feature_names = raw.feature_names;
    out.source = raw.source;
    out.encodings.resize(n_features, ColumnEncoding::numeric);

    for (std::size_t f = 0; f < n_features; ++f) {
        const auto& name = raw.feature_names[f];
        if (auto it = policy.forced.find(name); it != policy.forced.end()) {
            out.encodings[f] = it->second;
        } else if (raw.text_cells[f] > 0) {
            if (policy.text == CleaningPolicy::Text::reject)
                throw ColumnError(name, "contains non-numeric text and text encoding is disabled");
            out.encodings[f] = (policy.timestamp_as_epoch && name == policy.timestamp_column) ? ColumnEncoding::timestamp
                                                                                              : ColumnEncoding::hash;
        }
    }

    Matrix values = raw.values;
    std::vector<std::size_t> encoded(n_features, 0), nonfinite(n_features, 0), missing(n_features, 0),
        ts_fallback(n_features, 0);
    std::vector<bool> bad_row(raw.rows(), false);
    for (std::size_t r = 0; r < raw.rows(); ++r) {
        for (std::size_t f = 0; f < n_features; ++f) {
            double& v = values(r, f);
            if (raw.is_missing(r, f)) {
                ++missing[f];
                bad_row[r] = true;
                v = 0.0;
                continue;
            }
            switch (out.encodings[f]) {
                case ColumnEncoding::numeric:
                    if (std::isnan(v) && !csv::parse_number(raw.cell_text(r, f)))
                        throw ColumnError(raw.feature_names[f], "text cell '" + std::string(raw.cell_text(r, f)) +
                                                               "' in a column encoded as numeric");
                    if (!std::isfinite(v)) {
                        ++nonfinite[f];
                        bad_row[r] = true;
                        v = 0.0;
                    }
                    break;
                case ColumnEncoding::hash:
                    v = hash_text(raw.cell_text(r, f));
                    ++encoded[f];
                    break;
                case ColumnEncoding::timestamp:
                    if (auto t = parse_timestamp(raw.cell_text(r, f))) {
                        v = *t;
                    } else {
                        v = hash_text(raw.cell_text(r, f));
                        ++ts_fallback[f];
                    }
                    ++encoded[f];
                    break;
            }
        }
    }

    std::vector<std::size_t> keep;
    keep.reserve(raw.rows());
    for (std::size_t r = 0; r < raw.rows(); ++r) {
        if (bad_row[r] && policy.non_finite == CleaningPolicy::NonFinite::drop_row) {
            ++out.log.rows_dropped_nonfinite;
            continue;
        }
        keep.push_back(r);
    }
    if (policy.duplicates == CleaningPolicy::Duplicates::drop) {
        std::set<std::pair<std::vector<double>, std::string>> seen;
        std::vector<std::size_t> unique_rows;
        for (auto r : keep) {
            auto row = values.row(r);
            if (seen.emplace(std::vector<double>(row.begin(), row.end()), raw.raw_labels[r]).second)
                unique_rows.push_back(r);
            else
                ++out.log.rows_dropped_duplicate;
        }
        keep = std::move(unique_rows);
    }

    const bool drop = policy.non_finite == CleaningPolicy::NonFinite::drop_row;
    for (std::size_t f = 0; f < n_features; ++f) {
        const auto& name = raw.feature_names[f];
        if (nonfinite[f]) out.log.entries.push_back({name, nonfinite[f], drop ? "nonfinite:drop_row" : "nonfinite:zero"});
        if (missing[f]) out.log.entries.push_back({name, missing[f], drop ? "missing:drop_row" : "missing:zero"});
        if (encoded[f])
            out.log.entries.push_back({name, encoded[f], out.encodings[f] == ColumnEncoding::timestamp
                                                             ? "text:timestamp"
                                                             : "text:fnv1a32"});
        if (ts_fallback[f]) out.log.entries.push_back({name, ts_fallback[f], "timestamp:hash_fallback"});
    }

    if (keep.size() == raw.rows()) {
        out.features = std::move(values);
        out.raw_labels = raw.raw_labels;
    } else {
        out.features = Matrix(keep.size(), n_features);
        for (std::size_t i = 0; i < keep.size(); ++i) {
            std::copy(values.row(keep[i]).begin(), values.row(keep[i]).end(), out.features.row(i).begin());
            out.raw_labels.push_back(raw.raw_labels[keep[i]]);
        }
    }
    return out;
}

inline void CleaningLog::write_jsonl(std::ostream& out) const {
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') q.push_back('\\');
            q.push_back(c);
        }
        return q + "\"";
    };
    for (const auto& e : entries)
        out << "{\"column\":" << quote(e.column) << ",\"replaced\":" << e.replaced << ",\"rule\":" << quote(e.rule)
            << "}\n";
}

// --- labels ------------------------------------------------------------------

inline std::vector<LabelIndex> encode_labels(const std::vector<std::string>& raw_labels, const LabelDictionary& dict) {
    std::vector<LabelIndex> out;
    out.reserve(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        auto idx = dict.find(raw_labels[i]);
        if (!idx) throw LabelError(raw_labels[i], i);
        out.push_back(*idx);
    }
    return out;
}

inline LabeledDataset make_dataset(CleanedFlows cleaned, const LabelDictionary& dict) {
    LabeledDataset d;
    d.labels = encode_labels(cleaned.raw_labels, dict);
    d.features = std::move(cleaned.features);
    d.feature_names = std::move(cleaned.feature_names);
    d.label_dict = dict;
    d.provenance = cleaned.source;
    d.validate();
    return d;
}

/// Removes the named features (names not present are ignored).
inline LabeledDataset drop_features(const LabeledDataset& data, const std::vector<std::string>& names) {
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < data.cols(); ++c)
        if (std::find(names.begin(), names.end(), data.feature_names[c]) == names.end()) keep.push_back(c);
    LabeledDataset out;
    out.labels = data.labels;
    out.label_dict = data.label_dict;
    out.provenance = data.provenance;
    out.features = Matrix(data.rows(), keep.size());
    for (auto c : keep) out.feature_names.push_back(data.feature_names[c]);
    for (std::size_t r = 0; r < data.rows(); ++r)
        for (std::size_t j = 0; j < keep.size(); ++j) out.features(r, j) = data.features(r, keep[j]);
    return out;
}

/// Per-flow identifiers rather than traffic statistics.
inline const std::vector<std::string>& identifier_features() {
    static const std::vector<std::string> names{"Unnamed: 0", "Flow ID", "Source IP", "Destination IP", "Timestamp"};
    return names;
}

// --- split -------------------------------------------------------------------

/// Round half away from zero.
inline std::size_t round_count(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

struct Split {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<std::size_t> train_rows;  // row indices into the input
    std::vector<std::size_t> test_rows;
};

/// Per-label test quota round(fraction * n), at least 1 when fraction > 0
/// and n >= 2. Rows are taken in one seeded shuffle of the whole dataset, so
/// both halves come out in shuffled order.
inline Split stratified_split(const LabeledDataset& data, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) throw ArgumentError("test_fraction must be in [0, 1]");
    const auto counts = data.label_counts();
    std::vector<std::size_t> quota(counts.size(), 0);
    for (std::size_t l = 0; l < counts.size(); ++l) {
        std::size_t q = round_count(test_fraction * static_cast<double>(counts[l]));
        if (test_fraction > 0.0 && counts[l] >= 2 && q == 0) q = 1;
        quota[l] = std::min(q, counts[l]);
    }
    std::vector<std::size_t> order(data.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));

    std::vector<std::size_t> train_rows, test_rows;
    for (auto r : order) {
        auto& q = quota[data.labels[r]];
        if (q > 0) {
            test_rows.push_back(r);
            --q;
        } else {
            train_rows.push_back(r);
        }
    }
    Split split{data.subset(train_rows), data.subset(test_rows), std::move(train_rows), std::move(test_rows)};
    return split;
}

// --- standardization ---------------------------------------------------------

struct Standardizer {
    std::vector<double> means;
    std::vector<double> stddevs;  // population (divide by n)
    std::vector<std::string> fitted_on;

    std::size_t index_of(const std::string& name) const {
        auto it = std::find(fitted_on.begin(), fitted_on.end(), name);
        if (it == fitted_on.end()) throw SchemaError("feature '" + name + "' unknown to standardizer");
        return static_cast<std::size_t>(it - fitted_on.begin());
    }

    /// Statistics for `names` only, in that order.
    Standardizer subset(const std::vector<std::string>& names) const {
        Standardizer s;
        for (const auto& n : names) {
            const auto i = index_of(n);
            s.means.push_back(means[i]);
            s.stddevs.push_back(stddevs[i]);
            s.fitted_on.push_back(n);
        }
        return s;
    }

    double transform(std::size_t feature, double x) const {
        return stddevs[feature] == 0.0 ? 0.0 : (x - means[feature]) / stddevs[feature];
    }

    bool operator==(const Standardizer&) const = default;
};

inline Standardizer fit_standardizer(const LabeledDataset& train) {
    if (train.rows() == 0) throw ArgumentError("cannot fit standardizer on zero rows");
    const std::size_t n = train.rows(), m = train.cols();
    Standardizer s;
    s.fitted_on = train.feature_names;
    s.means.assign(m, 0.0);
    s.stddevs.assign(m, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c) s.means[c] += train.features(r, c);
    for (auto& mean : s.means) mean /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c) {
            const double d = train.features(r, c) - s.means[c];
            s.stddevs[c] += d * d;
        }
    for (auto& sd : s.stddevs) sd = std::sqrt(sd / static_cast<double>(n));
    return s;
}

inline void apply_standardizer_inplace(const Standardizer& s, Matrix& features) {
    for (std::size_t r = 0; r < features.rows(); ++r) {
        auto row = features.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = s.transform(c, row[c]);
    }
}

inline LabeledDataset apply_standardizer(const Standardizer& s, const LabeledDataset& data) {
    if (data.feature_names != s.fitted_on) throw SchemaError("feature names differ from those the standardizer was fit on");
    LabeledDataset out = data;
    apply_standardizer_inplace(s, out.features);
    return out;
}

// --- CSV output --------------------------------------------------------------

/// Writes features with shortest round-trip number text, plus a "Label"
/// column of canonical label names.
inline void write_dataset_csv(std::ostream& out, const LabeledDataset& data) {
    std::vector<std::string> fields = data.feature_names;
    fields.push_back("Label");
    csv::write_record(out, fields);
    for (std::size_t r = 0; r < data.rows(); ++r) {
        fields.clear();
        for (double v : data.features.row(r)) fields.push_back(csv::format_double(v));
        fields.push_back(data.label_dict.name(data.labels[r]));
        csv::write_record(out, fields);
    }
}

/// Reads a CSV written by write_dataset_csv. Every feature cell must be a
/// finite number.
inline LabeledDataset read_dataset_csv(std::istream& in, const LabelDictionary& dict) {
    auto raw = parse_flow_csv(in);
    CleaningPolicy strict;
    strict.text = CleaningPolicy::Text::reject;
    for (std::size_t f = 0; f < raw.feature_names.size(); ++f)
        if (raw.special_cells[f] || raw.missing_cells[f])
            throw ColumnError(raw.feature_names[f], "non-finite or empty cell in prepared data");
    return make_dataset(clean_dataset(raw, strict), dict);
}

}  // namespace ddosml
