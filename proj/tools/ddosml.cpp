// Command-line front end: prepare / train / evaluate / predict / synth.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ddosml/pipeline.hpp"

namespace {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kArgument = 2,
    kSchema = 3,
    kIo = 4,
    kFormat = 5,
    kData = 6,
};

/// Reads {"prepare": {...}, "train": {...}, ...} where each key is a long
/// option name without the dashes. Flags given on the command line win.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        nlohmann::json j = nlohmann::json::object();
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const auto& name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& results = opt->results();
                j[name] = results.size() == 1 ? nlohmann::json(results.front()) : nlohmann::json(results);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        for (const CLI::App* sub : app->get_subcommands({})) {
            auto text = to_config(sub, default_also, false, "");
            if (!text.empty()) j[sub->get_name()] = nlohmann::json::parse(text);
        }
        return j.empty() ? std::string() : j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw CLI::ConversionError(std::string("config file: ") + e.what());
        }
        return collect(j, "", {});
    }

private:
    static std::string scalar(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    std::vector<CLI::ConfigItem> collect(const nlohmann::json& j, const std::string& name,
                                         std::vector<std::string> prefix) const {
        std::vector<CLI::ConfigItem> items;
        if (j.is_object()) {
            if (!name.empty()) prefix.push_back(name);
            for (const auto& [key, value] : j.items()) {
                auto sub = collect(value, key, prefix);
                items.insert(items.end(), sub.begin(), sub.end());
            }
            return items;
        }
        if (name.empty()) throw CLI::ConversionError("config file must be a JSON object");
        CLI::ConfigItem item;
        item.name = name;
        item.parents = prefix;
        if (j.is_array())
            for (const auto& v : j) item.inputs.push_back(scalar(v));
        else
            item.inputs.push_back(scalar(j));
        items.push_back(std::move(item));
        return items;
    }
};

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

ddosml::FeaturesPerSplit parse_features_per_split(const std::string& text) {
    if (text == "sqrt") return ddosml::FeaturesPerSplit::sqrt();
    if (text == "all") return ddosml::FeaturesPerSplit::all();
    try {
        std::size_t pos = 0;
        const auto n = std::stoull(text, &pos);
        if (pos == text.size() && n > 0) return ddosml::FeaturesPerSplit::count(n);
    } catch (const std::exception&) {
    }
    throw ddosml::ArgumentError("--features-per-split must be sqrt, all or a positive integer");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DDoS flow classification: prepare, train, evaluate, predict"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file with per-subcommand option values");

    // prepare
    ddosml::PrepareConfig prep;
    std::string prep_out, labels_text, clean_policy = "zero";
    std::vector<std::string> subsample;
    auto* prepare = app.add_subcommand("prepare", "parse, clean, split, standardize and select features");
    prepare->add_option("--input", prep.inputs, "flow CSV file(s)")->required()->check(CLI::ExistingFile);
    prepare->add_option("--out", prep_out, "output directory (default $DDOSML_OUT_DIR/prepared)");
    prepare->add_option("--test-fraction", prep.test_fraction, "held-out fraction per label")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    prepare->add_option("--k", prep.k, "number of features to keep")->capture_default_str();
    prepare->add_option("--seed", prep.seed, "master seed")->capture_default_str();
    prepare->add_flag("--drop-identifier-features", prep.drop_identifier_features,
                      "exclude Flow ID, Source/Destination IP, Timestamp and the row index column");
    prepare->add_option("--clean-policy", clean_policy, "non-finite cell handling")
        ->check(CLI::IsMember({"zero", "drop"}))
        ->capture_default_str();
    prepare->add_option("--labels", labels_text, "comma-separated label names in index order (default: inferred)");
    prepare->add_option("--subsample", subsample, "LABEL=N: keep a seeded random N rows of LABEL");
    prepare->add_option("--rank-trees", prep.rank_trees, "extra-trees forest size for ranking")->capture_default_str();
    prepare->add_option("--threads", prep.threads, "worker threads (0: all cores)");

    // train
    ddosml::TrainConfig train;
    std::string train_prepared, train_out, model_kind = "rf", features_per_split;
    std::optional<std::size_t> max_depth;
    train.created = ddosml::default_created_stamp();
    auto* train_cmd = app.add_subcommand("train", "fit one model on a prepared directory");
    train_cmd->add_option("--prepared", train_prepared, "prepared directory")->required();
    train_cmd->add_option("--model", model_kind, "rf | dt | gnb | svm")
        ->check(CLI::IsMember({"rf", "dt", "gnb", "svm"}))
        ->capture_default_str();
    train_cmd->add_option("--out", train_out, "artifact path (default $DDOSML_OUT_DIR/model.json)");
    train_cmd->add_option("--seed", train.seed, "model seed")->capture_default_str();
    train_cmd->add_option("--trees", train.trees, "random forest size")->capture_default_str();
    train_cmd->add_option("--max-depth", max_depth, "tree depth limit (default unlimited)");
    train_cmd->add_option("--min-samples-split", train.min_samples_split)->capture_default_str();
    train_cmd->add_option("--features-per-split", features_per_split, "sqrt | all | N (default sqrt for rf, all for dt)");
    train_cmd->add_option("--C", train.svm.C, "SVM cost")->capture_default_str();
    train_cmd->add_option("--reg", train.svm.regularization, "SVM regularization weight")->capture_default_str();
    train_cmd->add_option("--max-epochs", train.svm.max_epochs, "SVM epoch budget")->capture_default_str();
    train_cmd->add_option("--tol", train.svm.tolerance, "SVM relative improvement tolerance")->capture_default_str();
    train_cmd->add_option("--smoothing", train.nb_smoothing, "naive Bayes variance smoothing scale")
        ->capture_default_str();
    train_cmd->add_option("--created", train.created, "creation stamp stored in the artifact");
    train_cmd->add_option("--threads", train.threads, "worker threads (0: all cores)");

    // evaluate
    std::string eval_model, eval_prepared, eval_out;
    bool eval_on_train = false;
    auto* evaluate = app.add_subcommand("evaluate", "score the held-out split and write report.json / roc.csv");
    evaluate->add_option("--model", eval_model, "model artifact")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--prepared", eval_prepared, "prepared directory")->required();
    evaluate->add_option("--out", eval_out, "output directory (default $DDOSML_OUT_DIR/eval)");
    evaluate->add_flag("--on-train", eval_on_train, "score the training split instead (resubstitution)");

    // predict
    std::string pred_model, pred_input, pred_out;
    auto* predict = app.add_subcommand("predict", "label the flows of a raw CSV");
    predict->add_option("--model", pred_model, "model artifact")->required()->check(CLI::ExistingFile);
    predict->add_option("--input", pred_input, "flow CSV")->required()->check(CLI::ExistingFile);
    predict->add_option("--out", pred_out, "predictions CSV (default $DDOSML_OUT_DIR/predictions.csv)");

    // synth
    std::string synth_spec, synth_out;
    std::uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "generate class-conditional Gaussian flows");
    synth->add_option("--spec", synth_spec, "JSON spec file")->required()->check(CLI::ExistingFile);
    synth->add_option("--seed", synth_seed)->capture_default_str();
    synth->add_option("--out", synth_out, "CSV path (default $DDOSML_OUT_DIR/synthetic.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kArgument;
    }

    try {
        if (*prepare) {
            prep.out_dir = ddosml::default_output(prep_out, "prepared");
            prep.clean_policy = clean_policy == "drop" ? ddosml::CleaningPolicy::NonFinite::drop_row
                                                       : ddosml::CleaningPolicy::NonFinite::replace_zero;
            prep.labels = split_commas(labels_text);
            for (const auto& item : subsample) {
                const auto eq = item.find('=');
                if (eq == std::string::npos || eq == 0) throw ddosml::ArgumentError("--subsample expects LABEL=N");
                prep.subsample[item.substr(0, eq)] = std::stoull(item.substr(eq + 1));
            }
            const auto result = ddosml::cmd_prepare(prep);
            std::cout << "prepared " << result.train.rows() << " train / " << result.test.rows() << " test rows, "
                      << result.mask.names.size() << " features -> " << prep.out_dir.string() << '\n';
            std::cout << result.manifest.at("rows").dump(2) << '\n';
        } else if (*train_cmd) {
            train.prepared_dir = train_prepared;
            train.out = ddosml::default_output(train_out, "model.json");
            train.model = ddosml::model_kind_from_string(model_kind);
            train.max_depth = max_depth;
            if (!features_per_split.empty()) train.features_per_split = parse_features_per_split(features_per_split);
            const auto artifact = ddosml::cmd_train(train);
            std::cout << "trained " << ddosml::to_string(artifact.kind()) << " -> " << train.out.string() << '\n';
        } else if (*evaluate) {
            ddosml::cmd_evaluate(eval_model, eval_prepared, ddosml::default_output(eval_out, "eval"), &std::cout,
                                 eval_on_train);
        } else if (*predict) {
            const auto out = ddosml::default_output(pred_out, "predictions.csv");
            const auto rows = ddosml::cmd_predict(pred_model, pred_input, out);
            std::cout << "wrote " << rows << " predictions -> " << out.string() << '\n';
        } else if (*synth) {
            const auto out = ddosml::default_output(synth_out, "synthetic.csv");
            const auto spec = ddosml::synth_spec_from_json(
                ddosml::parse_json(ddosml::read_file(synth_spec), "synthetic spec"));
            ddosml::write_file_atomic(out, ddosml::synthetic_csv(spec, synth_seed));
            std::cout << "wrote synthetic data -> " << out.string() << '\n';
        }
    } catch (const ddosml::ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return kArgument;
    } catch (const ddosml::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kSchema;
    } catch (const ddosml::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const ddosml::FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kFormat;
    } catch (const ddosml::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kOk;
}
