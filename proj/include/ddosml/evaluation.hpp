#pragma once

// Confusion matrices, accuracy, per-label precision/recall/F1 and
// one-vs-rest ROC curves.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ddosml/csv.hpp"
#include "ddosml/dataset.hpp"
#include "ddosml/error.hpp"

namespace ddosml {

/// Argmax with ties to the lowest index; NaN rejected.
inline LabelIndex scores_to_prediction(std::span<const double> scores) { return argmax(scores); }

/// counts(i, j): rows with true label i predicted as j.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t n_labels) : n_(n_labels), counts_(n_labels * n_labels, 0) {}

    std::size_t n_labels() const noexcept { return n_; }
    std::size_t& operator()(std::size_t truth, std::size_t predicted) { return counts_[truth * n_ + predicted]; }
    std::size_t operator()(std::size_t truth, std::size_t predicted) const { return counts_[truth * n_ + predicted]; }

    std::size_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }
    std::size_t trace() const {
        std::size_t t = 0;
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }
    std::size_t row_sum(std::size_t i) const {
        std::size_t s = 0;
        for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j);
        return s;
    }
    std::size_t col_sum(std::size_t j) const {
        std::size_t s = 0;
        for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, j);
        return s;
    }

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> counts_;
};

inline ConfusionMatrix confusion_matrix(std::span<const LabelIndex> truth, std::span<const LabelIndex> predicted,
                                        std::size_t n_labels) {
    if (truth.size() != predicted.size()) throw ArgumentError("truth and prediction lengths differ");
    ConfusionMatrix cm(n_labels);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= n_labels || predicted[i] >= n_labels) throw ArgumentError("label index outside matrix");
        ++cm(truth[i], predicted[i]);
    }
    return cm;
}

inline double accuracy(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    if (total == 0) throw UndefinedMetric("accuracy of an empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

/// Unset optionals mean 0/0.
struct ClassMetrics {
    LabelIndex label = 0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::size_t support = 0;
    bool operator==(const ClassMetrics&) const = default;
};

inline ClassMetrics class_metrics(const ConfusionMatrix& cm, LabelIndex label) {
    if (label >= cm.n_labels()) throw ArgumentError("label index outside matrix");
    const auto tp = cm(label, label);
    const auto predicted = cm.col_sum(label);
    const auto actual = cm.row_sum(label);
    ClassMetrics m;
    m.label = label;
    m.support = actual;
    if (predicted) m.precision = static_cast<double>(tp) / static_cast<double>(predicted);
    if (actual) m.recall = static_cast<double>(tp) / static_cast<double>(actual);
    if (m.precision && m.recall && *m.precision + *m.recall > 0.0)
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    return m;
}

struct RocPoint {
    double threshold;  // scores >= threshold are called positive; +inf for the origin
    double fpr;
    double tpr;
    bool operator==(const RocPoint&) const = default;
};

struct RocCurve {
    LabelIndex label = 0;
    std::vector<RocPoint> points;
    double auc = 0.0;
    bool operator==(const RocCurve&) const = default;
};

/// Trapezoidal area under the (fpr, tpr) polyline.
inline double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    return area;
}

/// Sweeps thresholds over the distinct scores in descending order; tied
/// scores move the curve in one step.
inline RocCurve roc_curve(std::span<const bool> truth, std::span<const double> scores, LabelIndex label = 0) {
    if (truth.size() != scores.size()) throw ArgumentError("truth and score lengths differ");
    std::size_t positives = 0;
    for (bool t : truth) positives += t;
    const std::size_t negatives = truth.size() - positives;
    if (positives == 0 || negatives == 0) throw ArgumentError("degenerate ROC: need both positives and negatives");
    for (double s : scores)
        if (std::isnan(s)) throw ArgumentError("NaN score");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.label = label;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) (truth[order[i]] ? tp : fp) += 1;
        curve.points.push_back(
            {s, static_cast<double>(fp) / static_cast<double>(negatives), static_cast<double>(tp) / static_cast<double>(positives)});
    }
    curve.auc = auc(curve);
    return curve;
}

struct EvalReport {
    std::vector<std::string> label_names;
    ConfusionMatrix confusion;
    std::vector<ClassMetrics> metrics;
    double accuracy = 0.0;
    double baseline_accuracy = 0.0;  // always predicting the most frequent true label
    std::vector<std::optional<RocCurve>> roc;  // unset when a label has no positives or no negatives
    std::string provenance;

    bool operator==(const EvalReport&) const = default;
};

/// Predictions are the per-row argmax of `scores`; each label's ROC uses
/// that label's score column.
inline EvalReport build_report(std::span<const LabelIndex> truth, const Matrix& scores, const LabelDictionary& labels,
                               std::string provenance = {}) {
    const std::size_t k = labels.size();
    if (scores.rows() != truth.size() || scores.cols() != k) throw ArgumentError("score matrix shape does not match");
    std::vector<LabelIndex> predicted(truth.size());
    for (std::size_t r = 0; r < truth.size(); ++r) predicted[r] = scores_to_prediction(scores.row(r));

    EvalReport report;
    report.label_names = labels.names();
    report.provenance = std::move(provenance);
    report.confusion = confusion_matrix(truth, predicted, k);
    report.accuracy = accuracy(report.confusion);
    std::size_t majority = 0;
    for (std::size_t c = 0; c < k; ++c) {
        report.metrics.push_back(class_metrics(report.confusion, static_cast<LabelIndex>(c)));
        majority = std::max(majority, report.confusion.row_sum(c));
    }
    report.baseline_accuracy = static_cast<double>(majority) / static_cast<double>(truth.size());

    std::vector<double> column(truth.size());
    for (std::size_t c = 0; c < k; ++c) {
        const auto support = report.metrics[c].support;
        if (support == 0 || support == truth.size()) {
            report.roc.emplace_back();
            continue;
        }
        std::unique_ptr<bool[]> flags(new bool[truth.size()]);
        for (std::size_t r = 0; r < truth.size(); ++r) {
            flags[r] = truth[r] == c;
            column[r] = scores(r, c);
        }
        report.roc.push_back(roc_curve(std::span<const bool>(flags.get(), truth.size()), column, static_cast<LabelIndex>(c)));
    }
    return report;
}

/// label,threshold,fpr,tpr rows for every defined curve.
inline void write_roc_csv(std::ostream& out, const EvalReport& report) {
    csv::write_record(out, {"label", "threshold", "fpr", "tpr"});
    for (const auto& curve : report.roc) {
        if (!curve) continue;
        for (const auto& p : curve->points)
            csv::write_record(out, {report.label_names[curve->label], csv::format_double(p.threshold),
                                    csv::format_double(p.fpr), csv::format_double(p.tpr)});
    }
}

/// Percent with two decimals, or an em dash for undefined values.
inline std::string format_percent(const std::optional<double>& v) {
    if (!v) return "—";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
    return buf;
}

/// Per-label precision / recall / F1 table plus accuracy and the majority
/// baseline, values in percent.
inline void print_report_table(std::ostream& out, const EvalReport& report, const std::string& model_name = {}) {
    std::size_t width = 12;
    for (const auto& n : report.label_names) width = std::max(width, n.size() + 2);
    auto pad = [](std::string s, std::size_t w) {
        // em dash is 3 bytes but one column wide
        const std::size_t shown = s == "—" ? 1 : s.size();
        return s + std::string(w > shown ? w - shown : 1, ' ');
    };
    if (!model_name.empty()) out << model_name << '\n';
    out << pad("label", width) << pad("precision", 11) << pad("recall", 11) << pad("f1", 11) << pad("auc", 11)
        << "support\n";
    for (std::size_t c = 0; c < report.metrics.size(); ++c) {
        const auto& m = report.metrics[c];
        std::optional<double> area;
        if (report.roc[c]) area = report.roc[c]->auc;
        out << pad(report.label_names[c], width) << pad(format_percent(m.precision), 11)
            << pad(format_percent(m.recall), 11) << pad(format_percent(m.f1), 11) << pad(format_percent(area), 11)
            << m.support << '\n';
    }
    out << "accuracy            " << format_percent(report.accuracy) << '\n';
    out << "majority baseline   " << format_percent(report.baseline_accuracy) << '\n';
}

}  // namespace ddosml
