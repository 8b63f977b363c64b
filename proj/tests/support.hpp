#pragma once

#include <ddosml/dataset.hpp>

#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace support {

/// Builds a dataset from rows of values and label indices.
inline ddosml::LabeledDataset make(const std::vector<std::vector<double>>& rows,
                                   const std::vector<ddosml::LabelIndex>& labels,
                                   std::vector<std::string> label_names = {"A", "B"}) {
    ddosml::LabeledDataset d;
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    d.features = ddosml::Matrix(0, cols);
    for (const auto& r : rows) d.features.append_row(r);
    d.labels = labels;
    for (std::size_t c = 0; c < cols; ++c) d.feature_names.push_back("f" + std::to_string(c));
    d.label_dict = ddosml::LabelDictionary(std::move(label_names), {});
    return d;
}

/// Random integer-valued features so ties and duplicate values are common.
inline ddosml::LabeledDataset random_dataset(std::mt19937_64& gen, std::size_t rows, std::size_t cols,
                                             std::size_t n_labels, int value_range = 6) {
    std::uniform_int_distribution<int> value(0, value_range);
    std::uniform_int_distribution<std::size_t> label(0, n_labels - 1);
    std::vector<std::vector<double>> data(rows, std::vector<double>(cols));
    std::vector<ddosml::LabelIndex> labels(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        for (auto& v : data[r]) v = value(gen);
        labels[r] = static_cast<ddosml::LabelIndex>(label(gen));
    }
    std::vector<std::string> names;
    for (std::size_t l = 0; l < n_labels; ++l) names.push_back("L" + std::to_string(l));
    return make(data, labels, names);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("ddosml_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace support
