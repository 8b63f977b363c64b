#pragma once

// Extra-trees importance ranking and top-k projection.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ddosml/csv.hpp"
#include "ddosml/dataset.hpp"
#include "ddosml/error.hpp"
#include "ddosml/trees.hpp"

namespace ddosml {

struct RankedFeature {
    std::string name;
    std::size_t index = 0;  // column in the ranked dataset
    double importance = 0.0;
    bool operator==(const RankedFeature&) const = default;
};

/// Descending importance; ties by ascending column index.
struct ImportanceRanking {
    std::vector<RankedFeature> entries;
    ForestConfig config;

    std::size_t size() const noexcept { return entries.size(); }

    void write_csv(std::ostream& out) const {
        csv::write_record(out, {"name", "importance"});
        for (const auto& e : entries) csv::write_record(out, {e.name, csv::format_double(e.importance)});
    }

    bool operator==(const ImportanceRanking&) const = default;
};

struct FeatureMask {
    std::vector<std::string> names;
    std::vector<std::size_t> indices;  // positions in the dataset the ranking was built on
    bool operator==(const FeatureMask&) const = default;
};

/// Fits an extremely-randomized forest and ranks features by impurity
/// importance. `data` is expected to be standardized already.
inline ImportanceRanking rank_features(const LabeledDataset& data, ForestConfig config, std::size_t threads = 0) {
    if (data.rows() < 2) throw ArgumentError("rank_features needs at least 2 rows");
    if (data.labels_present() < 2) throw ArgumentError("no discriminative signal: fewer than 2 labels present");
    config.split_mode = SplitMode::random_threshold;
    const auto importance = impurity_importances(fit_forest(data, config, threads));

    ImportanceRanking ranking;
    ranking.config = config;
    for (std::size_t i = 0; i < importance.size(); ++i)
        ranking.entries.push_back({data.feature_names[i], i, importance[i]});
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const auto& a, const auto& b) { return a.importance > b.importance; });
    return ranking;
}

inline FeatureMask select_top_k(const ImportanceRanking& ranking, std::size_t k) {
    if (k < 1 || k > ranking.size())
        throw ArgumentError("k = " + std::to_string(k) + " outside [1, " + std::to_string(ranking.size()) + "]");
    FeatureMask mask;
    for (std::size_t i = 0; i < k; ++i) {
        mask.names.push_back(ranking.entries[i].name);
        mask.indices.push_back(ranking.entries[i].index);
    }
    return mask;
}

/// Columns of `data` named by the mask, in mask order.
inline LabeledDataset project(const LabeledDataset& data, const FeatureMask& mask) {
    std::vector<std::size_t> columns;
    for (const auto& name : mask.names) {
        auto it = std::find(data.feature_names.begin(), data.feature_names.end(), name);
        if (it == data.feature_names.end()) throw SchemaError("feature '" + name + "' missing from dataset");
        columns.push_back(static_cast<std::size_t>(it - data.feature_names.begin()));
    }
    LabeledDataset out;
    out.labels = data.labels;
    out.label_dict = data.label_dict;
    out.provenance = data.provenance;
    out.feature_names = mask.names;
    out.features = Matrix(data.rows(), columns.size());
    for (std::size_t r = 0; r < data.rows(); ++r)
        for (std::size_t j = 0; j < columns.size(); ++j) out.features(r, j) = data.features(r, columns[j]);
    return out;
}

}  // namespace ddosml
