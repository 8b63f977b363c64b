#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "ddosml/dataset.hpp"
#include "ddosml/error.hpp"

namespace ddosml {

/// Per-label priors, means and (smoothed) variances of a Gaussian naive
/// Bayes model. Labels absent from training have prior 0.
struct GaussianNB {
    std::vector<double> priors;
    std::vector<std::vector<double>> means;      // [label][feature]
    std::vector<std::vector<double>> variances;  // [label][feature], includes smoothing
    double smoothing = 0.0;

    std::size_t n_labels() const noexcept { return priors.size(); }
    std::size_t feature_count() const noexcept { return means.empty() ? 0 : means.front().size(); }

    bool operator==(const GaussianNB&) const = default;
};

/// Unsmoothed class statistics: priors, means and population variances.
struct ClassMoments {
    std::vector<std::size_t> counts;
    std::vector<double> priors;
    std::vector<std::vector<double>> means;
    std::vector<std::vector<double>> variances;
    std::vector<double> global_variances;
};

inline ClassMoments estimate_class_moments(const LabeledDataset& train) {
    if (train.rows() == 0) throw ArgumentError("cannot fit naive Bayes on an empty training set");
    const std::size_t k = train.label_dict.size(), m = train.cols(), n = train.rows();
    ClassMoments mo;
    mo.counts = train.label_counts();
    mo.priors.assign(k, 0.0);
    mo.means.assign(k, std::vector<double>(m, 0.0));
    mo.variances.assign(k, std::vector<double>(m, 0.0));
    mo.global_variances.assign(m, 0.0);

    std::vector<double> global_mean(m, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = train.features.row(r);
        auto& mean = mo.means[train.labels[r]];
        for (std::size_t f = 0; f < m; ++f) {
            mean[f] += row[f];
            global_mean[f] += row[f];
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        mo.priors[c] = static_cast<double>(mo.counts[c]) / static_cast<double>(n);
        if (mo.counts[c])
            for (auto& v : mo.means[c]) v /= static_cast<double>(mo.counts[c]);
    }
    for (auto& v : global_mean) v /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = train.features.row(r);
        const auto c = train.labels[r];
        for (std::size_t f = 0; f < m; ++f) {
            const double d = row[f] - mo.means[c][f];
            mo.variances[c][f] += d * d;
            const double g = row[f] - global_mean[f];
            mo.global_variances[f] += g * g;
        }
    }
    for (std::size_t c = 0; c < k; ++c)
        if (mo.counts[c])
            for (auto& v : mo.variances[c]) v /= static_cast<double>(mo.counts[c]);
    for (auto& v : mo.global_variances) v /= static_cast<double>(n);
    return mo;
}

/// Every variance gets smoothing_scale * (largest global feature variance)
/// added; when all features are constant the floor is smoothing_scale itself.
inline GaussianNB fit_gaussian_nb(const LabeledDataset& train, double smoothing_scale = 1e-9) {
    if (!(smoothing_scale > 0.0)) throw ArgumentError("smoothing scale must be positive");
    auto mo = estimate_class_moments(train);
    double max_var = 0.0;
    for (double v : mo.global_variances) max_var = std::max(max_var, v);
    GaussianNB model;
    model.smoothing = smoothing_scale * (max_var > 0.0 ? max_var : 1.0);
    model.priors = std::move(mo.priors);
    model.means = std::move(mo.means);
    model.variances = std::move(mo.variances);
    for (auto& per_label : model.variances)
        for (auto& v : per_label) v += model.smoothing;
    return model;
}

/// log prior + sum of per-feature Gaussian log densities (unnormalised).
/// Labels with prior 0 get the lowest finite double.
inline std::vector<double> gnb_log_posteriors(const GaussianNB& model, std::span<const double> record) {
    if (record.size() != model.feature_count()) throw ArgumentError("record length does not match model");
    require_no_nan(record);
    std::vector<double> scores(model.n_labels());
    for (std::size_t c = 0; c < scores.size(); ++c) {
        if (model.priors[c] <= 0.0) {
            scores[c] = std::numeric_limits<double>::lowest();
            continue;
        }
        double s = std::log(model.priors[c]);
        for (std::size_t f = 0; f < record.size(); ++f) {
            const double var = model.variances[c][f];
            const double d = record[f] - model.means[c][f];
            s -= 0.5 * std::log(2.0 * std::numbers::pi * var) + d * d / (2.0 * var);
        }
        scores[c] = std::max(s, std::numeric_limits<double>::lowest());
    }
    return scores;
}

/// Posterior probabilities (log-sum-exp normalised log posteriors).
inline std::vector<double> gnb_posteriors(const GaussianNB& model, std::span<const double> record) {
    auto scores = gnb_log_posteriors(model, record);
    const double top = *std::max_element(scores.begin(), scores.end());
    double total = 0.0;
    for (std::size_t c = 0; c < scores.size(); ++c) {
        scores[c] = model.priors[c] > 0.0 ? std::exp(scores[c] - top) : 0.0;
        total += scores[c];
    }
    for (auto& s : scores) s /= total;
    return scores;
}

}  // namespace ddosml
