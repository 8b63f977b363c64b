#pragma once

// JSON forms of datasets' side structures, models, reports and the model
// artifact. nlohmann::json keeps object keys sorted and prints doubles with
// the shortest round-trip text, so dump() output is canonical.

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ddosml/dataset.hpp"
#include "ddosml/error.hpp"
#include "ddosml/evaluation.hpp"
#include "ddosml/feature_select.hpp"
#include "ddosml/flow_ingest.hpp"
#include "ddosml/linear_svm.hpp"
#include "ddosml/naive_bayes.hpp"
#include "ddosml/trees.hpp"

namespace ddosml {

using Json = nlohmann::json;

// --- small helpers -----------------------------------------------------------

inline Json optional_to_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
inline std::optional<double> optional_from_json(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

/// Canonical text: sorted keys, shortest round-trip doubles, trailing newline.
inline std::string canonical_dump(const Json& j, int indent = -1) { return j.dump(indent) + "\n"; }

/// Parses JSON text; syntax errors become FormatError with the byte offset.
inline Json parse_json(const std::string& text, const std::string& what = "JSON") {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError(what + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

// --- flow_ingest -------------------------------------------------------------

inline void to_json(Json& j, const LabelDictionary& d) { j = Json{{"names", d.names()}, {"aliases", d.aliases()}}; }
inline void from_json(const Json& j, LabelDictionary& d) {
    d = LabelDictionary(j.at("names").get<std::vector<std::string>>(),
                        j.at("aliases").get<std::map<std::string, std::string>>());
}

inline void to_json(Json& j, const Standardizer& s) {
    j = Json{{"features", s.fitted_on}, {"means", s.means}, {"stddevs", s.stddevs}};
}
inline void from_json(const Json& j, Standardizer& s) {
    j.at("features").get_to(s.fitted_on);
    j.at("means").get_to(s.means);
    j.at("stddevs").get_to(s.stddevs);
    if (s.means.size() != s.fitted_on.size() || s.stddevs.size() != s.fitted_on.size())
        throw FormatError("standardizer lengths disagree");
    for (double sd : s.stddevs)
        if (!(sd >= 0.0)) throw FormatError("negative standard deviation in standardizer");
}

inline void to_json(Json& j, const CleaningLog& log) {
    j = Json::object();
    j["entries"] = Json::array();
    for (const auto& e : log.entries) j["entries"].push_back({{"column", e.column}, {"replaced", e.replaced}, {"rule", e.rule}});
    j["rows_dropped_duplicate"] = log.rows_dropped_duplicate;
    j["rows_dropped_nonfinite"] = log.rows_dropped_nonfinite;
}

inline Json encodings_to_json(const std::map<std::string, ColumnEncoding>& encodings) {
    Json j = Json::object();
    for (const auto& [name, e] : encodings) j[name] = to_string(e);
    return j;
}
inline std::map<std::string, ColumnEncoding> encodings_from_json(const Json& j) {
    std::map<std::string, ColumnEncoding> out;
    for (const auto& [name, e] : j.items()) out[name] = column_encoding_from_string(e.get<std::string>());
    return out;
}

// --- feature_select ----------------------------------------------------------

inline void to_json(Json& j, const FeatureMask& m) { j = Json{{"names", m.names}, {"indices", m.indices}}; }
inline void from_json(const Json& j, FeatureMask& m) {
    j.at("names").get_to(m.names);
    j.at("indices").get_to(m.indices);
    if (m.names.size() != m.indices.size()) throw FormatError("feature mask lengths disagree");
}

// --- trees -------------------------------------------------------------------

inline Json features_per_split_to_json(const FeaturesPerSplit& f) {
    switch (f.kind) {
        case FeaturesPerSplit::Kind::sqrt: return "sqrt";
        case FeaturesPerSplit::Kind::all: return "all";
        case FeaturesPerSplit::Kind::count: return f.n;
    }
    return "all";
}
inline FeaturesPerSplit features_per_split_from_json(const Json& j) {
    if (j.is_number_unsigned()) return FeaturesPerSplit::count(j.get<std::size_t>());
    const auto s = j.get<std::string>();
    if (s == "sqrt") return FeaturesPerSplit::sqrt();
    if (s == "all") return FeaturesPerSplit::all();
    throw FormatError("bad features_per_split '" + s + "'");
}

inline std::string to_string(SplitMode m) { return m == SplitMode::exhaustive ? "exhaustive" : "random_threshold"; }
inline SplitMode split_mode_from_string(const std::string& s) {
    if (s == "exhaustive") return SplitMode::exhaustive;
    if (s == "random_threshold") return SplitMode::random_threshold;
    throw FormatError("bad split_mode '" + s + "'");
}

inline void to_json(Json& j, const TreeConfig& c) {
    j = Json{{"features_per_split", features_per_split_to_json(c.features_per_split)},
             {"split_mode", to_string(c.split_mode)},
             {"max_depth", c.max_depth ? Json(*c.max_depth) : Json(nullptr)},
             {"min_samples_split", c.min_samples_split}};
}
inline void from_json(const Json& j, TreeConfig& c) {
    c.features_per_split = features_per_split_from_json(j.at("features_per_split"));
    c.split_mode = split_mode_from_string(j.at("split_mode").get<std::string>());
    c.max_depth = j.at("max_depth").is_null() ? std::nullopt : std::optional(j.at("max_depth").get<std::size_t>());
    j.at("min_samples_split").get_to(c.min_samples_split);
}

inline void to_json(Json& j, const ForestConfig& c) {
    to_json(j, c.tree_config());
    j["n_trees"] = c.n_trees;
    j["bootstrap"] = c.bootstrap;
    j["seed"] = c.seed;
}
inline void from_json(const Json& j, ForestConfig& c) {
    TreeConfig t;
    from_json(j, t);
    c.features_per_split = t.features_per_split;
    c.split_mode = t.split_mode;
    c.max_depth = t.max_depth;
    c.min_samples_split = t.min_samples_split;
    j.at("n_trees").get_to(c.n_trees);
    j.at("bootstrap").get_to(c.bootstrap);
    j.at("seed").get_to(c.seed);
}

inline Json nodes_to_json(const std::vector<TreeNode>& nodes) {
    Json arr = Json::array();
    for (const auto& n : nodes) {
        if (n.is_leaf())
            arr.push_back({{"counts", n.counts}});
        else
            arr.push_back({{"feature", n.rule.feature},
                           {"threshold", n.rule.threshold},
                           {"gain", n.gain},
                           {"n", n.n_samples},
                           {"left", n.left},
                           {"right", n.right}});
    }
    return arr;
}

inline std::vector<TreeNode> nodes_from_json(const Json& arr, std::size_t n_labels, std::size_t feature_count) {
    std::vector<TreeNode> nodes;
    for (const auto& jn : arr) {
        TreeNode n;
        if (jn.contains("counts")) {
            jn.at("counts").get_to(n.counts);
            if (n.counts.size() != n_labels) throw FormatError("leaf counts width differs from label count");
            for (auto c : n.counts) n.n_samples += c;
            if (n.n_samples == 0) throw FormatError("empty leaf");
        } else {
            jn.at("feature").get_to(n.rule.feature);
            jn.at("threshold").get_to(n.rule.threshold);
            jn.at("gain").get_to(n.gain);
            jn.at("n").get_to(n.n_samples);
            jn.at("left").get_to(n.left);
            jn.at("right").get_to(n.right);
            if (n.rule.feature >= feature_count) throw FormatError("split feature out of range");
        }
        nodes.push_back(std::move(n));
    }
    if (nodes.empty()) throw FormatError("tree without nodes");
    const auto size = static_cast<std::int32_t>(nodes.size());
    for (std::int32_t i = 0; i < size; ++i) {
        const auto& n = nodes[i];
        if (!n.is_leaf() && (n.left <= i || n.right <= i || n.left >= size || n.right >= size))
            throw FormatError("tree child index out of range");
    }
    return nodes;
}

inline void to_json(Json& j, const DecisionTree& t) {
    j = Json{{"config", t.config},
             {"n_labels", t.n_labels},
             {"feature_count", t.feature_count},
             {"nodes", nodes_to_json(t.nodes)}};
}
inline void from_json(const Json& j, DecisionTree& t) {
    j.at("config").get_to(t.config);
    j.at("n_labels").get_to(t.n_labels);
    j.at("feature_count").get_to(t.feature_count);
    t.nodes = nodes_from_json(j.at("nodes"), t.n_labels, t.feature_count);
}

inline void to_json(Json& j, const Forest& f) {
    Json trees = Json::array();
    for (const auto& t : f.trees) trees.push_back(nodes_to_json(t.nodes));
    j = Json{{"config", f.config}, {"n_labels", f.n_labels}, {"feature_count", f.feature_count}, {"trees", trees}};
}
inline void from_json(const Json& j, Forest& f) {
    j.at("config").get_to(f.config);
    j.at("n_labels").get_to(f.n_labels);
    j.at("feature_count").get_to(f.feature_count);
    f.trees.clear();
    for (const auto& jt : j.at("trees")) {
        DecisionTree t;
        t.n_labels = f.n_labels;
        t.feature_count = f.feature_count;
        t.config = f.config.tree_config();
        t.nodes = nodes_from_json(jt, f.n_labels, f.feature_count);
        f.trees.push_back(std::move(t));
    }
    if (f.trees.size() != f.config.n_trees) throw FormatError("forest tree count differs from config");
}

// --- linear models -----------------------------------------------------------

inline void to_json(Json& j, const GaussianNB& m) {
    j = Json{{"priors", m.priors}, {"means", m.means}, {"variances", m.variances}, {"smoothing", m.smoothing}};
}
inline void from_json(const Json& j, GaussianNB& m) {
    j.at("priors").get_to(m.priors);
    j.at("means").get_to(m.means);
    j.at("variances").get_to(m.variances);
    j.at("smoothing").get_to(m.smoothing);
    if (m.means.size() != m.priors.size() || m.variances.size() != m.priors.size())
        throw FormatError("naive Bayes label dimensions disagree");
}

inline void to_json(Json& j, const SvmConfig& c) {
    j = Json{{"C", c.C},
             {"regularization", c.regularization},
             {"max_epochs", c.max_epochs},
             {"tolerance", c.tolerance},
             {"armijo_sigma", c.armijo_sigma},
             {"backtrack_beta", c.backtrack_beta},
             {"seed", c.seed}};
}
inline void from_json(const Json& j, SvmConfig& c) {
    j.at("C").get_to(c.C);
    j.at("regularization").get_to(c.regularization);
    j.at("max_epochs").get_to(c.max_epochs);
    j.at("tolerance").get_to(c.tolerance);
    j.at("armijo_sigma").get_to(c.armijo_sigma);
    j.at("backtrack_beta").get_to(c.backtrack_beta);
    j.at("seed").get_to(c.seed);
}

inline void to_json(Json& j, const LinearSvm& m) {
    j = Json{{"weights", m.weights}, {"biases", m.biases}, {"config", m.config}};
}
inline void from_json(const Json& j, LinearSvm& m) {
    j.at("weights").get_to(m.weights);
    j.at("biases").get_to(m.biases);
    j.at("config").get_to(m.config);
    if (m.weights.size() != m.biases.size()) throw FormatError("SVM weight/bias counts disagree");
}

// --- evaluation --------------------------------------------------------------

inline void to_json(Json& j, const EvalReport& r) {
    j = Json::object();
    j["accuracy"] = r.accuracy;
    j["baseline_accuracy"] = r.baseline_accuracy;
    j["provenance"] = r.provenance;
    Json confusion = Json::array();
    for (std::size_t i = 0; i < r.confusion.n_labels(); ++i) {
        Json row = Json::array();
        for (std::size_t c = 0; c < r.confusion.n_labels(); ++c) row.push_back(r.confusion(i, c));
        confusion.push_back(row);
    }
    j["confusion"] = confusion;
    Json labels = Json::array();
    for (std::size_t c = 0; c < r.metrics.size(); ++c) {
        const auto& m = r.metrics[c];
        Json jl{{"name", r.label_names[c]},
                {"precision", optional_to_json(m.precision)},
                {"recall", optional_to_json(m.recall)},
                {"f1", optional_to_json(m.f1)},
                {"support", m.support},
                {"auc", r.roc[c] ? Json(r.roc[c]->auc) : Json(nullptr)}};
        if (r.roc[c]) {
            Json pts = Json::array();
            for (const auto& p : r.roc[c]->points)
                pts.push_back({std::isinf(p.threshold) ? Json(nullptr) : Json(p.threshold), p.fpr, p.tpr});
            jl["roc"] = pts;
        } else {
            jl["roc"] = nullptr;
        }
        labels.push_back(jl);
    }
    j["labels"] = labels;
}

inline void from_json(const Json& j, EvalReport& r) {
    j.at("accuracy").get_to(r.accuracy);
    j.at("baseline_accuracy").get_to(r.baseline_accuracy);
    j.at("provenance").get_to(r.provenance);
    const auto& confusion = j.at("confusion");
    r.confusion = ConfusionMatrix(confusion.size());
    for (std::size_t i = 0; i < confusion.size(); ++i)
        for (std::size_t c = 0; c < confusion.size(); ++c) r.confusion(i, c) = confusion.at(i).at(c).get<std::size_t>();
    r.label_names.clear();
    r.metrics.clear();
    r.roc.clear();
    LabelIndex c = 0;
    for (const auto& jl : j.at("labels")) {
        r.label_names.push_back(jl.at("name").get<std::string>());
        ClassMetrics m;
        m.label = c;
        m.precision = optional_from_json(jl.at("precision"));
        m.recall = optional_from_json(jl.at("recall"));
        m.f1 = optional_from_json(jl.at("f1"));
        jl.at("support").get_to(m.support);
        r.metrics.push_back(m);
        if (jl.at("roc").is_null()) {
            r.roc.emplace_back();
        } else {
            RocCurve curve;
            curve.label = c;
            for (const auto& p : jl.at("roc"))
                curve.points.push_back({p.at(0).is_null() ? std::numeric_limits<double>::infinity() : p.at(0).get<double>(),
                                        p.at(1).get<double>(), p.at(2).get<double>()});
            curve.auc = jl.at("auc").get<double>();
            r.roc.push_back(std::move(curve));
        }
        ++c;
    }
}

// --- model artifact ----------------------------------------------------------

enum class ModelKind { rf, dt, gnb, svm };

inline std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::rf: return "rf";
        case ModelKind::dt: return "dt";
        case ModelKind::gnb: return "gnb";
        case ModelKind::svm: return "svm";
    }
    return "rf";
}

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "rf") return ModelKind::rf;
    if (s == "dt") return ModelKind::dt;
    if (s == "gnb") return ModelKind::gnb;
    if (s == "svm") return ModelKind::svm;
    throw ArgumentError("unknown model kind '" + s + "' (expected rf, dt, gnb or svm)");
}

using Model = std::variant<Forest, DecisionTree, GaussianNB, LinearSvm>;

inline ModelKind kind_of(const Model& m) {
    switch (m.index()) {
        case 0: return ModelKind::rf;
        case 1: return ModelKind::dt;
        case 2: return ModelKind::gnb;
        default: return ModelKind::svm;
    }
}

/// Per-label scores: vote fractions (rf), leaf distribution (dt), posterior
/// probabilities (gnb) or raw margins (svm).
inline std::vector<double> model_scores(const Model& model, std::span<const double> record) {
    return std::visit(
        [&](const auto& m) -> std::vector<double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Forest>) return predict_forest(m, record);
            else if constexpr (std::is_same_v<T, DecisionTree>) return predict_tree(m, record);
            else if constexpr (std::is_same_v<T, GaussianNB>) return gnb_posteriors(m, record);
            else return svm_decision_scores(m, record);
        },
        model);
}

inline Matrix model_score_matrix(const Model& model, const Matrix& features, std::size_t n_labels) {
    Matrix scores(features.rows(), n_labels);
    for (std::size_t r = 0; r < features.rows(); ++r) {
        const auto s = model_scores(model, features.row(r));
        std::copy(s.begin(), s.end(), scores.row(r).begin());
    }
    return scores;
}

struct ModelArtifact {
    static constexpr int kFormatVersion = 1;

    int format_version = kFormatVersion;
    LabelDictionary labels;
    Standardizer standardizer;  // over all prepared features
    FeatureMask mask;
    std::map<std::string, ColumnEncoding> encodings;  // how raw CSV columns become numbers
    Model model;
    Json config = Json::object();  // pipeline config snapshot
    std::string created = "unspecified";

    ModelKind kind() const { return kind_of(model); }
};

inline Json artifact_to_json(const ModelArtifact& a) {
    Json j = Json::object();
    j["format_version"] = a.format_version;
    j["kind"] = to_string(a.kind());
    j["labels"] = a.labels;
    j["standardizer"] = a.standardizer;
    j["mask"] = a.mask;
    j["encodings"] = encodings_to_json(a.encodings);
    std::visit([&](const auto& m) { j["model"] = m; }, a.model);
    j["config"] = a.config;
    j["created"] = a.created;
    return j;
}

inline ModelArtifact artifact_from_json(const Json& j) {
    try {
        ModelArtifact a;
        a.format_version = j.at("format_version").get<int>();
        if (a.format_version != ModelArtifact::kFormatVersion)
            throw FormatError("unsupported format_version " + std::to_string(a.format_version));
        j.at("labels").get_to(a.labels);
        j.at("standardizer").get_to(a.standardizer);
        j.at("mask").get_to(a.mask);
        a.encodings = encodings_from_json(j.at("encodings"));
        switch (model_kind_from_string(j.at("kind").get<std::string>())) {
            case ModelKind::rf: a.model = j.at("model").get<Forest>(); break;
            case ModelKind::dt: a.model = j.at("model").get<DecisionTree>(); break;
            case ModelKind::gnb: a.model = j.at("model").get<GaussianNB>(); break;
            case ModelKind::svm: a.model = j.at("model").get<LinearSvm>(); break;
        }
        a.config = j.at("config");
        j.at("created").get_to(a.created);
        return a;
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed model artifact: ") + e.what());
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("malformed model artifact: ") + e.what());
    }
}

inline std::string artifact_to_text(const ModelArtifact& a) { return canonical_dump(artifact_to_json(a)); }

inline ModelArtifact artifact_from_text(const std::string& text) {
    return artifact_from_json(parse_json(text, "model artifact"));
}

}  // namespace ddosml
