#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddosml/csv.hpp"
#include "ddosml/error.hpp"

namespace ddosml {

using LabelIndex = std::uint32_t;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw ArgumentError("matrix data size does not match shape");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_) throw ArgumentError("row width does not match matrix");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    const std::vector<double>& data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Canonical label names (index = position) plus spelling aliases used by
/// the various CICDDoS2019 releases.
class LabelDictionary {
public:
    LabelDictionary() = default;
    explicit LabelDictionary(std::vector<std::string> names,
                             std::map<std::string, std::string> aliases = default_aliases())
        : names_(std::move(names)), aliases_(std::move(aliases)) {
        for (std::size_t i = 0; i < names_.size(); ++i)
            for (std::size_t j = i + 1; j < names_.size(); ++j)
                if (names_[i] == names_[j]) throw ArgumentError("duplicate label name '" + names_[i] + "'");
    }

    static std::map<std::string, std::string> default_aliases() {
        return {{"LDAP", "DDoS_LDAP"},
                {"DrDoS_LDAP", "DDoS_LDAP"},
                {"MSSQL", "DDoS_MSSQL"},
                {"DrDoS_MSSQL", "DDoS_MSSQL"}};
    }

    /// BENIGN / DDoS_LDAP / DDoS_MSSQL, the three classes of the MSSQL day file.
    static LabelDictionary cicddos2019() { return LabelDictionary({"BENIGN", "DDoS_LDAP", "DDoS_MSSQL"}); }

    /// Sorted set of canonical names found in `raw_labels`.
    static LabelDictionary infer(const std::vector<std::string>& raw_labels,
                                 std::map<std::string, std::string> aliases = default_aliases()) {
        LabelDictionary probe({}, aliases);
        std::vector<std::string> names;
        for (const auto& raw : raw_labels) names.push_back(probe.canonical(raw));
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        return LabelDictionary(std::move(names), std::move(aliases));
    }

    /// Trimmed text with aliases resolved.
    std::string canonical(std::string_view raw) const {
        std::string text(csv::trim(raw));
        if (auto it = aliases_.find(text); it != aliases_.end()) return it->second;
        return text;
    }

    std::optional<LabelIndex> find(std::string_view raw) const {
        const std::string name = canonical(raw);
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<LabelIndex>(i);
        return std::nullopt;
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(LabelIndex i) const { return names_.at(i); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::map<std::string, std::string>& aliases() const noexcept { return aliases_; }

    bool operator==(const LabelDictionary&) const = default;

private:
    std::vector<std::string> names_;
    std::map<std::string, std::string> aliases_;
};

/// Numeric feature matrix with one label per row.
struct LabeledDataset {
    Matrix features;
    std::vector<LabelIndex> labels;
    std::vector<std::string> feature_names;
    LabelDictionary label_dict;
    std::string provenance;

    std::size_t rows() const noexcept { return features.rows(); }
    std::size_t cols() const noexcept { return features.cols(); }

    std::vector<std::size_t> label_counts() const {
        std::vector<std::size_t> counts(label_dict.size(), 0);
        for (auto l : labels) ++counts.at(l);
        return counts;
    }

    /// Number of distinct labels that occur at least once.
    std::size_t labels_present() const {
        const auto counts = label_counts();
        return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
    }

    /// Throws ArgumentError if any dataset invariant is broken.
    void validate(bool require_finite = true) const {
        if (labels.size() != features.rows()) throw ArgumentError("label count does not match row count");
        if (feature_names.size() != features.cols()) throw ArgumentError("feature name count does not match column count");
        for (auto l : labels)
            if (l >= label_dict.size()) throw ArgumentError("label index outside dictionary");
        if (require_finite)
            for (double v : features.data())
                if (!std::isfinite(v)) throw ArgumentError("non-finite feature value");
    }

    /// Copy holding only `rows`, in the given order.
    LabeledDataset subset(std::span<const std::size_t> rows) const {
        LabeledDataset out;
        out.feature_names = feature_names;
        out.label_dict = label_dict;
        out.provenance = provenance;
        std::vector<double> data;
        data.reserve(rows.size() * cols());
        out.labels.reserve(rows.size());
        for (auto r : rows) {
            const auto src = features.row(r);
            data.insert(data.end(), src.begin(), src.end());
            out.labels.push_back(labels[r]);
        }
        out.features = Matrix(rows.size(), cols(), std::move(data));
        return out;
    }

    bool operator==(const LabeledDataset&) const = default;
};

/// Index of the largest score; ties go to the lowest index. NaN is rejected.
inline LabelIndex argmax(std::span<const double> scores) {
    if (scores.empty()) throw ArgumentError("argmax of empty score vector");
    std::size_t best = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (std::isnan(scores[i])) throw ArgumentError("NaN score");
        if (scores[i] > scores[best]) best = i;
    }
    return static_cast<LabelIndex>(best);
}

inline void require_no_nan(std::span<const double> record) {
    for (double v : record)
        if (std::isnan(v)) throw ArgumentError("NaN in input record");
}

}  // namespace ddosml
