#pragma once

// prepare -> train -> evaluate orchestration, model persistence and the
// synthetic data generator. Every output is a function of the inputs and the
// configuration; nothing depends on wall-clock time or thread count.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddosml/dataset.hpp"
#include "ddosml/error.hpp"
#include "ddosml/evaluation.hpp"
#include "ddosml/feature_select.hpp"
#include "ddosml/flow_ingest.hpp"
#include "ddosml/linear_svm.hpp"
#include "ddosml/naive_bayes.hpp"
#include "ddosml/random.hpp"
#include "ddosml/serialization.hpp"
#include "ddosml/trees.hpp"

namespace ddosml {

namespace fs = std::filesystem;

// --- file helpers --------------------------------------------------------------

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes via a temporary file and rename, so readers never see a partial file.
inline void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

// --- configuration -------------------------------------------------------------

struct PrepareConfig {
    std::vector<std::string> inputs;
    fs::path out_dir;
    std::vector<std::string> labels;  // empty: sorted canonical labels found in the data
    std::map<std::string, std::string> aliases = LabelDictionary::default_aliases();
    CleaningPolicy::NonFinite clean_policy = CleaningPolicy::NonFinite::replace_zero;
    bool drop_identifier_features = false;
    double test_fraction = 0.3;
    std::uint64_t seed = 0;
    std::size_t k = 20;
    std::size_t rank_trees = 100;
    std::map<std::string, std::size_t> subsample;  // canonical label -> max rows
    std::size_t threads = 0;                       // not part of the output

    void validate() const {
        if (inputs.empty()) throw ArgumentError("prepare needs at least one --input");
        if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) throw ArgumentError("--test-fraction must be in [0, 1]");
        if (k < 1) throw ArgumentError("--k must be >= 1");
        if (rank_trees < 1) throw ArgumentError("--rank-trees must be >= 1");
    }

    Json to_json() const {
        return Json{{"inputs", inputs},
                    {"labels", labels},
                    {"aliases", aliases},
                    {"clean_policy", clean_policy == CleaningPolicy::NonFinite::drop_row ? "drop" : "zero"},
                    {"drop_identifier_features", drop_identifier_features},
                    {"test_fraction", test_fraction},
                    {"seed", seed},
                    {"k", k},
                    {"rank_trees", rank_trees},
                    {"subsample", subsample}};
    }
};

struct TrainConfig {
    fs::path prepared_dir;
    fs::path out;
    ModelKind model = ModelKind::rf;
    std::uint64_t seed = 0;
    // trees
    std::size_t trees = 100;
    std::optional<std::size_t> max_depth;
    std::size_t min_samples_split = 2;
    std::optional<FeaturesPerSplit> features_per_split;  // default: sqrt for rf, all for dt
    // svm
    SvmConfig svm;
    // gnb
    double nb_smoothing = 1e-9;
    std::string created = "unspecified";
    std::size_t threads = 0;

    Json to_json() const {
        Json j{{"model", to_string(model)}, {"seed", seed}};
        switch (model) {
            case ModelKind::rf:
            case ModelKind::dt:
                if (model == ModelKind::rf) j["trees"] = trees;
                j["max_depth"] = max_depth ? Json(*max_depth) : Json(nullptr);
                j["min_samples_split"] = min_samples_split;
                j["features_per_split"] =
                    features_per_split ? features_per_split_to_json(*features_per_split) : Json(nullptr);
                break;
            case ModelKind::svm: {
                SvmConfig c = svm;
                c.seed = seed;
                j["svm"] = c;
                break;
            }
            case ModelKind::gnb: j["smoothing_scale"] = nb_smoothing; break;
        }
        return j;
    }
};

/// SOURCE_DATE_EPOCH when set (reproducible builds convention), otherwise
/// "unspecified".
inline std::string default_created_stamp() {
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) return std::string("epoch:") + epoch;
    return "unspecified";
}

/// Output location under DDOSML_OUT_DIR when the caller gave none.
inline fs::path default_output(const fs::path& given, const std::string& leaf) {
    if (!given.empty()) return given;
    if (const char* dir = std::getenv("DDOSML_OUT_DIR"); dir && *dir) return fs::path(dir) / leaf;
    throw ArgumentError("no output location given and DDOSML_OUT_DIR is not set");
}

// --- prepare -------------------------------------------------------------------

struct PreparedFiles {
    static constexpr const char* train = "train.csv";
    static constexpr const char* test = "test.csv";
    static constexpr const char* manifest = "manifest.json";
    static constexpr const char* standardizer = "standardizer.json";
    static constexpr const char* mask = "mask.json";
    static constexpr const char* ranking = "ranking.csv";
    static constexpr const char* cleaning_log = "cleaning_log.jsonl";
    static constexpr const char* split = "split.csv";
};

struct PrepareResult {
    LabeledDataset train;  // standardized and projected
    LabeledDataset test;
    Standardizer standardizer;
    ImportanceRanking ranking;
    FeatureMask mask;
    CleaningLog cleaning_log;
    std::map<std::string, ColumnEncoding> encodings;
    std::vector<std::size_t> train_rows;  // indices into the cleaned input
    std::vector<std::size_t> test_rows;
    Json manifest;
};

namespace detail {

inline Json label_count_json(const LabeledDataset& d) {
    Json j = Json::object();
    const auto counts = d.label_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) j[d.label_dict.name(static_cast<LabelIndex>(c))] = counts[c];
    return j;
}

inline std::string dataset_csv(const LabeledDataset& d) {
    std::ostringstream ss;
    write_dataset_csv(ss, d);
    return ss.str();
}

/// Stage errors keep their type and gain the stage name.
template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const RowError& e) {
        throw RowError(e.line(), std::string("[") + stage + "] " + e.detail());
    } catch (const SchemaError& e) {
        throw SchemaError(std::string("[") + stage + "] " + e.what());
    } catch (const ArgumentError& e) {
        throw ArgumentError(std::string("[") + stage + "] " + e.what());
    } catch (const IoError& e) {
        throw IoError(std::string("[") + stage + "] " + e.what());
    } catch (const ColumnError& e) {
        throw ColumnError(e.column(), std::string("[") + stage + "] " + e.detail());
    }
}

}  // namespace detail

/// Computes everything `prepare` writes, without touching the file system
/// except to read the inputs.
inline PrepareResult prepare_dataset(const PrepareConfig& config) {
    config.validate();
    ParseOptions options;
    if (!config.subsample.empty()) options.sampler = RowSampler{config.subsample, derive_seed(config.seed, 1), config.aliases};

    RawFlowTable raw = detail::run_stage("parse", [&] {
        FlowCsvParser parser(options);
        for (const auto& input : config.inputs) {
            std::ifstream in(input, std::ios::binary);
            if (!in) throw IoError("cannot open input '" + input + "'");
            parser.feed(in, fs::path(input).filename().string());
        }
        return parser.finish();
    });

    CleaningPolicy policy;
    policy.non_finite = config.clean_policy;
    CleanedFlows cleaned = detail::run_stage("clean", [&] { return clean_dataset(raw, policy); });
    std::map<std::string, ColumnEncoding> encodings;
    for (std::size_t f = 0; f < cleaned.feature_names.size(); ++f)
        encodings[cleaned.feature_names[f]] = cleaned.encodings[f];
    const CleaningLog log = cleaned.log;

    LabeledDataset data = detail::run_stage("encode", [&] {
        const LabelDictionary dict = config.labels.empty() ? LabelDictionary::infer(cleaned.raw_labels, config.aliases)
                                                           : LabelDictionary(config.labels, config.aliases);
        return make_dataset(std::move(cleaned), dict);
    });
    if (config.drop_identifier_features) data = drop_features(data, identifier_features());

    Split split = detail::run_stage("split", [&] { return stratified_split(data, config.test_fraction, config.seed); });

    PrepareResult result;
    result.cleaning_log = log;
    result.standardizer = detail::run_stage("standardize", [&] { return fit_standardizer(split.train); });
    const LabeledDataset train_std = apply_standardizer(result.standardizer, split.train);
    const LabeledDataset test_std = apply_standardizer(result.standardizer, split.test);

    result.ranking = detail::run_stage("rank", [&] {
        ForestConfig rank_config = ForestConfig::extra_trees(derive_seed(config.seed, 2));
        rank_config.n_trees = config.rank_trees;
        return rank_features(train_std, rank_config, config.threads);
    });
    result.mask = detail::run_stage("select", [&] { return select_top_k(result.ranking, config.k); });
    result.train = project(train_std, result.mask);
    result.test = project(test_std, result.mask);
    for (const auto& name : data.feature_names) result.encodings[name] = encodings.at(name);

    Json manifest = Json::object();
    manifest["format_version"] = 1;
    manifest["config"] = config.to_json();
    manifest["labels"] = data.label_dict;
    manifest["rows"] = {{"total", detail::label_count_json(data)},
                        {"train", detail::label_count_json(split.train)},
                        {"test", detail::label_count_json(split.test)}};
    manifest["features"] = data.feature_names;
    manifest["kept_features"] = result.mask.names;
    manifest["encodings"] = encodings_to_json(result.encodings);
    manifest["cleaning"] = log;
    Json ranking = Json::array();
    for (const auto& e : result.ranking.entries) ranking.push_back({{"name", e.name}, {"importance", e.importance}});
    manifest["ranking"] = ranking;
    manifest["ranking_config"] = result.ranking.config;
    manifest["sources"] = raw.source;
    result.manifest = std::move(manifest);

    result.train_rows = std::move(split.train_rows);
    result.test_rows = std::move(split.test_rows);
    return result;
}

/// Runs prepare_dataset and writes the prepared directory.
inline PrepareResult cmd_prepare(const PrepareConfig& config) {
    PrepareResult result = prepare_dataset(config);
    const fs::path& dir = config.out_dir;
    std::ostringstream split_rows;
    csv::write_record(split_rows, {"row_index", "split"});
    std::vector<std::pair<std::size_t, const char*>> rows;
    for (auto r : result.train_rows) rows.emplace_back(r, "train");
    for (auto r : result.test_rows) rows.emplace_back(r, "test");
    std::sort(rows.begin(), rows.end());
    for (const auto& [r, which] : rows) csv::write_record(split_rows, {std::to_string(r), which});
    write_file_atomic(dir / PreparedFiles::train, detail::dataset_csv(result.train));
    write_file_atomic(dir / PreparedFiles::test, detail::dataset_csv(result.test));
    write_file_atomic(dir / PreparedFiles::standardizer, canonical_dump(Json(result.standardizer), 2));
    write_file_atomic(dir / PreparedFiles::mask, canonical_dump(Json(result.mask), 2));
    std::ostringstream ranking, log;
    result.ranking.write_csv(ranking);
    result.cleaning_log.write_jsonl(log);
    write_file_atomic(dir / PreparedFiles::ranking, ranking.str());
    write_file_atomic(dir / PreparedFiles::cleaning_log, log.str());
    write_file_atomic(dir / PreparedFiles::split, split_rows.str());
    write_file_atomic(dir / PreparedFiles::manifest, canonical_dump(result.manifest, 2));
    return result;
}

// --- prepared directory access -------------------------------------------------

struct PreparedData {
    Json manifest;
    LabelDictionary labels;
    Standardizer standardizer;
    FeatureMask mask;
    std::map<std::string, ColumnEncoding> encodings;
};

inline PreparedData load_prepared(const fs::path& dir) {
    const fs::path manifest_path = dir / PreparedFiles::manifest;
    if (!fs::exists(manifest_path)) throw IoError("'" + dir.string() + "' is not a prepared directory (no manifest.json)");
    PreparedData p;
    try {
        p.manifest = parse_json(read_file(manifest_path), "manifest.json");
        p.manifest.at("labels").get_to(p.labels);
        p.standardizer = parse_json(read_file(dir / PreparedFiles::standardizer), "standardizer.json").get<Standardizer>();
        p.mask = parse_json(read_file(dir / PreparedFiles::mask), "mask.json").get<FeatureMask>();
        p.encodings = encodings_from_json(p.manifest.at("encodings"));
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed prepared directory: ") + e.what());
    }
    return p;
}

/// Reads train.csv or test.csv and checks its columns against the mask.
inline LabeledDataset load_prepared_split(const fs::path& dir, const char* file, const LabelDictionary& labels,
                                          const FeatureMask& mask) {
    std::ifstream in(dir / file, std::ios::binary);
    if (!in) throw IoError("cannot open '" + (dir / file).string() + "'");
    LabeledDataset d = read_dataset_csv(in, labels);
    if (d.feature_names != mask.names) {
        std::string missing;
        for (const auto& n : mask.names)
            if (std::find(d.feature_names.begin(), d.feature_names.end(), n) == d.feature_names.end())
                missing += (missing.empty() ? "" : ", ") + n;
        throw SchemaError(std::string(file) + " columns do not match the model's feature mask" +
                          (missing.empty() ? std::string(" (order differs)") : "; missing: " + missing));
    }
    return d;
}

// --- train -----------------------------------------------------------------------

inline Model train_model(const LabeledDataset& train, const TrainConfig& config) {
    switch (config.model) {
        case ModelKind::rf: {
            ForestConfig fc = ForestConfig::random_forest(config.seed);
            fc.n_trees = config.trees;
            fc.max_depth = config.max_depth;
            fc.min_samples_split = config.min_samples_split;
            if (config.features_per_split) fc.features_per_split = *config.features_per_split;
            return fit_forest(train, fc, config.threads);
        }
        case ModelKind::dt: {
            TreeConfig tc;
            tc.features_per_split = config.features_per_split.value_or(FeaturesPerSplit::all());
            tc.max_depth = config.max_depth;
            tc.min_samples_split = config.min_samples_split;
            std::vector<std::size_t> rows(train.rows());
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
            Rng rng(config.seed);
            return fit_tree(rows, train, tc, rng);
        }
        case ModelKind::gnb: return fit_gaussian_nb(train, config.nb_smoothing);
        case ModelKind::svm: {
            SvmConfig sc = config.svm;
            sc.seed = config.seed;
            return fit_svm_ovr(train, sc, nullptr, config.threads);
        }
    }
    throw ArgumentError("unknown model kind");
}

inline ModelArtifact cmd_train(const TrainConfig& config) {
    const PreparedData prepared = load_prepared(config.prepared_dir);
    const LabeledDataset train =
        load_prepared_split(config.prepared_dir, PreparedFiles::train, prepared.labels, prepared.mask);
    if (train.rows() == 0) throw ArgumentError("prepared training split is empty");

    ModelArtifact artifact;
    artifact.labels = prepared.labels;
    artifact.standardizer = prepared.standardizer;
    artifact.mask = prepared.mask;
    for (const auto& name : prepared.mask.names) artifact.encodings[name] = prepared.encodings.at(name);
    artifact.model = train_model(train, config);
    artifact.config = Json{{"prepare", prepared.manifest.at("config")}, {"train", config.to_json()}};
    artifact.created = config.created;
    if (!config.out.empty()) write_file_atomic(config.out, artifact_to_text(artifact));
    return artifact;
}

inline ModelArtifact load_artifact(const fs::path& path) { return artifact_from_text(read_file(path)); }

inline void save_artifact(const fs::path& path, const ModelArtifact& a) { write_file_atomic(path, artifact_to_text(a)); }

// --- evaluate --------------------------------------------------------------------

struct EvaluateResult {
    EvalReport report;
    std::vector<LabelIndex> predictions;
};

inline EvaluateResult evaluate_artifact(const ModelArtifact& artifact, const LabeledDataset& test) {
    if (test.rows() == 0) throw ArgumentError("evaluation split is empty");
    const Matrix scores = model_score_matrix(artifact.model, test.features, artifact.labels.size());
    EvaluateResult result;
    result.report = build_report(test.labels, scores, artifact.labels, "model=" + to_string(artifact.kind()));
    for (std::size_t r = 0; r < scores.rows(); ++r) result.predictions.push_back(scores_to_prediction(scores.row(r)));
    return result;
}

/// Scores the prepared test split (or train split with use_train) and writes
/// report.json, roc.csv and predictions.csv into out_dir.
inline EvaluateResult cmd_evaluate(const fs::path& model_path, const fs::path& prepared_dir, const fs::path& out_dir,
                                   std::ostream* table = nullptr, bool use_train = false) {
    const ModelArtifact artifact = load_artifact(model_path);
    const PreparedData prepared = load_prepared(prepared_dir);
    if (prepared.labels.names() != artifact.labels.names())
        throw SchemaError("prepared label dictionary differs from the model's");
    const LabeledDataset data = load_prepared_split(prepared_dir, use_train ? PreparedFiles::train : PreparedFiles::test,
                                                    artifact.labels, artifact.mask);
    EvaluateResult result = evaluate_artifact(artifact, data);
    result.report.provenance += use_train ? " split=train" : " split=test";

    std::ostringstream roc, predictions;
    write_roc_csv(roc, result.report);
    csv::write_record(predictions, {"row", "truth", "predicted"});
    for (std::size_t r = 0; r < result.predictions.size(); ++r)
        csv::write_record(predictions, {std::to_string(r), artifact.labels.name(data.labels[r]),
                                        artifact.labels.name(result.predictions[r])});
    write_file_atomic(out_dir / "report.json", canonical_dump(Json(result.report), 2));
    write_file_atomic(out_dir / "roc.csv", roc.str());
    write_file_atomic(out_dir / "predictions.csv", predictions.str());
    if (table) print_report_table(*table, result.report, "model: " + to_string(artifact.kind()));
    return result;
}

// --- predict ---------------------------------------------------------------------

/// Scores raw flow CSV text. The input needs every masked feature column
/// (before projection); a label column, if present, is ignored.
inline Matrix score_raw_flows(const ModelArtifact& artifact, std::istream& in) {
    ParseOptions options;
    options.require_label = false;
    RawFlowTable raw = parse_flow_csv(in, options);
    std::string missing;
    for (const auto& n : artifact.mask.names)
        if (std::find(raw.feature_names.begin(), raw.feature_names.end(), n) == raw.feature_names.end())
            missing += (missing.empty() ? "" : ", ") + n;
    if (!missing.empty()) throw SchemaError("input lacks model features: " + missing);

    CleaningPolicy policy;
    policy.forced = artifact.encodings;
    CleanedFlows cleaned = clean_dataset(raw, policy);
    LabeledDataset features;
    features.features = std::move(cleaned.features);
    features.feature_names = std::move(cleaned.feature_names);
    features.labels.assign(features.features.rows(), 0);
    features.label_dict = LabelDictionary({"unlabeled"});
    LabeledDataset projected = project(features, artifact.mask);
    apply_standardizer_inplace(artifact.standardizer.subset(artifact.mask.names), projected.features);
    return model_score_matrix(artifact.model, projected.features, artifact.labels.size());
}

/// Writes row_index, predicted label and one score column per label.
inline std::size_t cmd_predict(const fs::path& model_path, const fs::path& input, const fs::path& out) {
    const ModelArtifact artifact = load_artifact(model_path);
    std::ifstream in(input, std::ios::binary);
    if (!in) throw IoError("cannot open input '" + input.string() + "'");
    const Matrix scores = score_raw_flows(artifact, in);
    std::ostringstream csv_out;
    std::vector<std::string> header{"row_index", "predicted"};
    for (const auto& n : artifact.labels.names()) header.push_back("score_" + n);
    csv::write_record(csv_out, header);
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        std::vector<std::string> fields{std::to_string(r), artifact.labels.name(scores_to_prediction(scores.row(r)))};
        for (double s : scores.row(r)) fields.push_back(csv::format_double(s));
        csv::write_record(csv_out, fields);
    }
    write_file_atomic(out, csv_out.str());
    return scores.rows();
}

// --- synthetic data ----------------------------------------------------------------

struct SynthLabel {
    std::string name;
    std::size_t count = 0;
    std::vector<double> means;      // one per feature
    std::vector<double> variances;  // one per feature, > 0
};

struct SynthSpec {
    std::vector<std::string> feature_names;
    std::vector<SynthLabel> labels;

    void validate() const {
        if (labels.size() < 2) throw ArgumentError("synthetic spec needs at least 2 labels");
        if (feature_names.empty()) throw ArgumentError("synthetic spec needs at least 1 feature");
        for (const auto& l : labels) {
            if (l.means.size() != feature_names.size() || l.variances.size() != feature_names.size())
                throw ArgumentError("label '" + l.name + "': means/variances must have one entry per feature");
            for (double v : l.variances)
                if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("label '" + l.name + "': variances must be positive");
            for (double m : l.means)
                if (!std::isfinite(m)) throw ArgumentError("label '" + l.name + "': means must be finite");
        }
    }

    /// Two labels with shared scalar mean offsets, for quick experiments.
    static SynthSpec gaussian_pair(std::size_t features, std::size_t per_label, double separation, double variance = 1.0) {
        SynthSpec s;
        for (std::size_t f = 0; f < features; ++f) s.feature_names.push_back("f" + std::to_string(f));
        s.labels.push_back({"A", per_label, std::vector<double>(features, -separation), std::vector<double>(features, variance)});
        s.labels.push_back({"B", per_label, std::vector<double>(features, separation), std::vector<double>(features, variance)});
        return s;
    }
};

/// Accepts {"features": n | [names], "labels": [{"name", "count", "mean", "variance"}]}
/// where mean and variance are a number (broadcast) or one value per feature.
inline SynthSpec synth_spec_from_json(const Json& j) {
    try {
        SynthSpec s;
        const auto& features = j.at("features");
        if (features.is_array()) {
            features.get_to(s.feature_names);
        } else {
            const auto n = features.get<std::size_t>();
            for (std::size_t f = 0; f < n; ++f) s.feature_names.push_back("f" + std::to_string(f));
        }
        const std::size_t n = s.feature_names.size();
        auto vec = [n](const Json& v, const char* what) {
            if (v.is_number()) return std::vector<double>(n, v.get<double>());
            auto out = v.get<std::vector<double>>();
            if (out.size() != n) throw ArgumentError(std::string(what) + " needs one entry per feature");
            return out;
        };
        for (const auto& jl : j.at("labels")) {
            SynthLabel l;
            jl.at("name").get_to(l.name);
            jl.at("count").get_to(l.count);
            l.means = vec(jl.at("mean"), "mean");
            l.variances = jl.contains("variance") ? vec(jl.at("variance"), "variance") : std::vector<double>(n, 1.0);
            s.labels.push_back(std::move(l));
        }
        s.validate();
        return s;
    } catch (const Json::exception& e) {
        throw ArgumentError(std::string("invalid synthetic spec: ") + e.what());
    }
}

/// Class-conditional independent Gaussians, label blocks in spec order.
inline LabeledDataset generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::vector<std::string> names;
    for (const auto& l : spec.labels) names.push_back(l.name);
    LabeledDataset d;
    d.feature_names = spec.feature_names;
    d.label_dict = LabelDictionary(names, {});
    d.provenance = "synthetic seed=" + std::to_string(seed);
    Rng rng(seed);
    std::vector<double> data;
    for (std::size_t c = 0; c < spec.labels.size(); ++c) {
        const auto& l = spec.labels[c];
        for (std::size_t i = 0; i < l.count; ++i) {
            for (std::size_t f = 0; f < spec.feature_names.size(); ++f)
                data.push_back(l.means[f] + std::sqrt(l.variances[f]) * rng.normal());
            d.labels.push_back(static_cast<LabelIndex>(c));
        }
    }
    d.features = Matrix(d.labels.size(), spec.feature_names.size(), std::move(data));
    return d;
}

inline std::string synthetic_csv(const SynthSpec& spec, std::uint64_t seed) {
    return detail::dataset_csv(generate_synthetic(spec, seed));
}

/// Each count times `factor`, rounded half away from zero.
inline std::vector<std::size_t> scale_counts(const std::vector<std::size_t>& counts, double factor) {
    std::vector<std::size_t> out;
    for (auto c : counts) out.push_back(round_count(static_cast<double>(c) * factor));
    return out;
}

}  // namespace ddosml
