#pragma once

// Entropy-based decision trees and two bagged ensembles over them: bootstrap
// random forests (optimised thresholds) and extremely randomized trees
// (one uniform threshold per candidate feature).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ddosml/dataset.hpp"
#include "ddosml/error.hpp"
#include "ddosml/parallel.hpp"
#include "ddosml/random.hpp"

namespace ddosml {

using Counts = std::vector<std::size_t>;

/// Shannon entropy in bits of a label histogram.
inline double entropy(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw ArgumentError("entropy of an empty histogram");
    double h = 0.0;
    const double n = static_cast<double>(total);
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

/// Parent entropy minus the size-weighted entropy of the children. The
/// children must partition the parent label by label.
inline double information_gain(std::span<const std::size_t> parent, std::span<const Counts> children) {
    for (std::size_t l = 0; l < parent.size(); ++l) {
        std::size_t sum = 0;
        for (const auto& child : children) {
            if (child.size() != parent.size()) throw ArgumentError("child histogram width differs from parent");
            sum += child[l];
        }
        if (sum != parent[l]) throw ArgumentError("children do not partition the parent");
    }
    std::size_t n = 0;
    for (auto c : parent) n += c;
    double weighted = 0.0;
    for (const auto& child : children) {
        std::size_t nk = 0;
        for (auto c : child) nk += c;
        if (nk) weighted += static_cast<double>(nk) / static_cast<double>(n) * entropy(child);
    }
    return entropy(parent) - weighted;
}

/// Go left iff value <= threshold.
struct SplitRule {
    std::uint32_t feature = 0;
    double threshold = 0.0;
    bool operator==(const SplitRule&) const = default;
};

struct SplitCandidate {
    SplitRule rule;
    double gain = 0.0;
};

enum class SplitMode { exhaustive, random_threshold };

namespace detail {

/// Gain of splitting `parent` into `left` and parent - left, without
/// allocating. Same arithmetic as information_gain.
inline double split_gain(const Counts& parent, const Counts& left, std::size_t n_left, std::size_t n,
                         double parent_entropy, Counts& right_scratch) {
    for (std::size_t l = 0; l < parent.size(); ++l) right_scratch[l] = parent[l] - left[l];
    const double wl = static_cast<double>(n_left) / static_cast<double>(n);
    const double wr = static_cast<double>(n - n_left) / static_cast<double>(n);
    return parent_entropy - (wl * entropy(left) + wr * entropy(right_scratch));
}

}  // namespace detail

/// Best (feature, threshold) over `candidate_features` for the given rows.
///
/// Exhaustive mode scores every midpoint between consecutive distinct values;
/// random-threshold mode draws one threshold uniformly in (min, max) per
/// non-constant feature. Candidates are visited in the given order and ties
/// keep the earlier one. Returns nullopt for a pure node or when no candidate
/// separates the rows into two non-empty sides. An impure node may return a
/// zero-gain split, which is what lets unlimited trees separate XOR-like
/// patterns.
inline std::optional<SplitCandidate> find_best_split(std::span<const std::size_t> rows, const LabeledDataset& data,
                                                     std::span<const std::uint32_t> candidate_features,
                                                     SplitMode mode, Rng& rng) {
    if (rows.size() < 2 || candidate_features.empty()) return std::nullopt;
    const std::size_t n_labels = data.label_dict.size();
    Counts parent(n_labels, 0);
    for (auto r : rows) ++parent[data.labels[r]];
    const double parent_entropy = entropy(parent);
    if (parent_entropy == 0.0) return std::nullopt;

    std::optional<SplitCandidate> best;
    Counts left(n_labels), right(n_labels);
    std::vector<std::pair<double, LabelIndex>> sorted;

    for (auto feature : candidate_features) {
        if (feature >= data.cols()) throw ArgumentError("candidate feature index out of range");
        if (mode == SplitMode::exhaustive) {
            sorted.clear();
            for (auto r : rows) sorted.emplace_back(data.features(r, feature), data.labels[r]);
            std::sort(sorted.begin(), sorted.end());
            std::fill(left.begin(), left.end(), 0);
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                ++left[sorted[i].second];
                const double lo = sorted[i].first, hi = sorted[i + 1].first;
                if (!(lo < hi)) continue;
                double threshold = lo + (hi - lo) / 2.0;
                if (!(threshold < hi)) threshold = lo;
                const double gain = detail::split_gain(parent, left, i + 1, sorted.size(), parent_entropy, right);
                if (!best || gain > best->gain) best = SplitCandidate{{feature, threshold}, gain};
            }
        } else {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (auto r : rows) {
                lo = std::min(lo, data.features(r, feature));
                hi = std::max(hi, data.features(r, feature));
            }
            if (!(lo < hi)) continue;
            double threshold = lo + rng.uniform() * (hi - lo);
            if (!(threshold < hi)) threshold = lo;
            std::fill(left.begin(), left.end(), 0);
            std::size_t n_left = 0;
            for (auto r : rows)
                if (data.features(r, feature) <= threshold) {
                    ++left[data.labels[r]];
                    ++n_left;
                }
            const double gain = detail::split_gain(parent, left, n_left, rows.size(), parent_entropy, right);
            if (!best || gain > best->gain) best = SplitCandidate{{feature, threshold}, gain};
        }
    }
    return best;
}

/// How many features to draw at each node.
struct FeaturesPerSplit {
    enum class Kind { sqrt, all, count };
    Kind kind = Kind::sqrt;
    std::size_t n = 0;

    static FeaturesPerSplit sqrt() { return {Kind::sqrt, 0}; }
    static FeaturesPerSplit all() { return {Kind::all, 0}; }
    static FeaturesPerSplit count(std::size_t n) { return {Kind::count, n}; }

    std::size_t resolve(std::size_t feature_count) const {
        switch (kind) {
            case Kind::sqrt:
                return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(feature_count))));
            case Kind::all: return feature_count;
            case Kind::count:
                if (n == 0 || n > feature_count)
                    throw ArgumentError("features_per_split " + std::to_string(n) + " outside [1, " +
                                        std::to_string(feature_count) + "]");
                return n;
        }
        return feature_count;
    }

    bool operator==(const FeaturesPerSplit&) const = default;
};

struct TreeConfig {
    FeaturesPerSplit features_per_split = FeaturesPerSplit::all();
    SplitMode split_mode = SplitMode::exhaustive;
    std::optional<std::size_t> max_depth;
    std::size_t min_samples_split = 2;
    bool operator==(const TreeConfig&) const = default;
};

/// Internal when left >= 0; a leaf otherwise. Leaves carry label counts.
struct TreeNode {
    SplitRule rule;
    double gain = 0.0;
    std::size_t n_samples = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    Counts counts;

    bool is_leaf() const noexcept { return left < 0; }
    bool operator==(const TreeNode&) const = default;
};

/// Nodes in depth-first pre-order; nodes[0] is the root.
struct DecisionTree {
    std::vector<TreeNode> nodes;
    std::size_t n_labels = 0;
    std::size_t feature_count = 0;
    TreeConfig config;

    std::size_t depth() const {
        std::size_t best = 0;
        std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
        while (!stack.empty()) {
            auto [i, d] = stack.back();
            stack.pop_back();
            best = std::max(best, d);
            if (!nodes[i].is_leaf()) {
                stack.emplace_back(nodes[i].left, d + 1);
                stack.emplace_back(nodes[i].right, d + 1);
            }
        }
        return best;
    }

    const TreeNode& leaf_for(std::span<const double> record) const {
        if (record.size() != feature_count) throw ArgumentError("record length does not match tree feature count");
        require_no_nan(record);
        const TreeNode* node = &nodes.front();
        while (!node->is_leaf())
            node = &nodes[record[node->rule.feature] <= node->rule.threshold ? node->left : node->right];
        return *node;
    }

    bool operator==(const DecisionTree&) const = default;
};

/// Grows a tree on `rows` (duplicates allowed, e.g. from a bootstrap).
///
/// A node becomes a leaf when it is pure, has fewer than min_samples_split
/// rows, sits at max_depth, or find_best_split finds nothing. Candidate
/// features are drawn without replacement in seeded order; features constant
/// on the node do not count toward features_per_split. With every feature
/// requested, candidates are taken in index order and no randomness is used.
inline DecisionTree fit_tree(std::span<const std::size_t> rows, const LabeledDataset& data, const TreeConfig& config,
                             Rng& rng) {
    if (rows.empty()) throw ArgumentError("fit_tree needs at least one row");
    if (config.min_samples_split < 2) throw ArgumentError("min_samples_split must be >= 2");
    DecisionTree tree;
    tree.n_labels = data.label_dict.size();
    tree.feature_count = data.cols();
    tree.config = config;
    const std::size_t quota = data.cols() == 0 ? 0 : config.features_per_split.resolve(data.cols());

    std::vector<std::size_t> work(rows.begin(), rows.end());
    std::vector<std::uint32_t> order(data.cols());
    std::vector<std::uint32_t> candidates;

    struct Task {
        std::size_t begin, end, depth;
        std::int32_t parent;
        bool is_left;
    };
    std::vector<Task> stack{{0, work.size(), 0, -1, false}};
    while (!stack.empty()) {
        const Task task = stack.back();
        stack.pop_back();
        const auto index = static_cast<std::int32_t>(tree.nodes.size());
        if (task.parent >= 0) (task.is_left ? tree.nodes[task.parent].left : tree.nodes[task.parent].right) = index;
        tree.nodes.emplace_back();
        const std::span<std::size_t> node_rows(work.data() + task.begin, task.end - task.begin);
        tree.nodes[index].n_samples = node_rows.size();

        Counts counts(tree.n_labels, 0);
        for (auto r : node_rows) ++counts[data.labels[r]];
        const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;

        std::optional<SplitCandidate> split;
        if (!pure && node_rows.size() >= config.min_samples_split &&
            (!config.max_depth || task.depth < *config.max_depth) && quota > 0) {
            for (std::uint32_t f = 0; f < order.size(); ++f) order[f] = f;
            if (quota < data.cols()) rng.shuffle(std::span<std::uint32_t>(order));
            candidates.clear();
            for (auto f : order) {
                if (candidates.size() == quota) break;
                const double first = data.features(node_rows.front(), f);
                const bool constant = std::all_of(node_rows.begin(), node_rows.end(),
                                                  [&](auto r) { return data.features(r, f) == first; });
                if (!constant) candidates.push_back(f);
            }
            split = find_best_split(node_rows, data, candidates, config.split_mode, rng);
        }

        if (!split) {
            tree.nodes[index].counts = std::move(counts);
            continue;
        }
        tree.nodes[index].rule = split->rule;
        tree.nodes[index].gain = std::max(0.0, split->gain);
        const auto mid = std::stable_partition(node_rows.begin(), node_rows.end(), [&](auto r) {
            return data.features(r, split->rule.feature) <= split->rule.threshold;
        });
        const std::size_t split_at = task.begin + static_cast<std::size_t>(mid - node_rows.begin());
        // Right pushed first so the left subtree is built (and numbered) first.
        stack.push_back({split_at, task.end, task.depth + 1, index, false});
        stack.push_back({task.begin, split_at, task.depth + 1, index, true});
    }
    return tree;
}

/// Leaf label distribution for `record`.
inline std::vector<double> predict_tree(const DecisionTree& tree, std::span<const double> record) {
    const auto& leaf = tree.leaf_for(record);
    std::size_t total = 0;
    for (auto c : leaf.counts) total += c;
    std::vector<double> p(tree.n_labels, 0.0);
    for (std::size_t l = 0; l < p.size(); ++l) p[l] = static_cast<double>(leaf.counts[l]) / static_cast<double>(total);
    return p;
}

/// Label with the most training rows at the reached leaf (ties: lowest).
inline LabelIndex tree_vote(const DecisionTree& tree, std::span<const double> record) {
    const auto& counts = tree.leaf_for(record).counts;
    return static_cast<LabelIndex>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

struct ForestConfig {
    std::size_t n_trees = 100;
    bool bootstrap = true;
    FeaturesPerSplit features_per_split = FeaturesPerSplit::sqrt();
    SplitMode split_mode = SplitMode::exhaustive;
    std::optional<std::size_t> max_depth;
    std::size_t min_samples_split = 2;
    std::uint64_t seed = 0;

    /// Bootstrap, sqrt features, optimised thresholds.
    static ForestConfig random_forest(std::uint64_t seed = 0) {
        ForestConfig c;
        c.seed = seed;
        return c;
    }

    /// No bootstrap, sqrt features, random thresholds.
    static ForestConfig extra_trees(std::uint64_t seed = 0) {
        ForestConfig c;
        c.bootstrap = false;
        c.split_mode = SplitMode::random_threshold;
        c.seed = seed;
        return c;
    }

    TreeConfig tree_config() const { return {features_per_split, split_mode, max_depth, min_samples_split}; }

    bool operator==(const ForestConfig&) const = default;
};

struct Forest {
    std::vector<DecisionTree> trees;
    ForestConfig config;
    std::size_t n_labels = 0;
    std::size_t feature_count = 0;

    bool operator==(const Forest&) const = default;
};

/// Seed of tree `t`; tree t of a larger forest with the same master seed is
/// identical to tree t of a smaller one.
inline std::uint64_t tree_seed(std::uint64_t master, std::size_t t) { return derive_seed(master, t); }

/// Fits config.n_trees trees. Tree t uses its own RNG seeded by
/// tree_seed(config.seed, t), so the result does not depend on `threads`.
inline Forest fit_forest(const LabeledDataset& data, const ForestConfig& config, std::size_t threads = 0) {
    if (data.rows() == 0) throw ArgumentError("fit_forest needs at least one row");
    if (config.n_trees == 0) throw ArgumentError("n_trees must be >= 1");
    config.features_per_split.resolve(data.cols());
    Forest forest;
    forest.config = config;
    forest.n_labels = data.label_dict.size();
    forest.feature_count = data.cols();
    forest.trees.resize(config.n_trees);
    const TreeConfig tree_config = config.tree_config();
    parallel_for(config.n_trees, threads, [&](std::size_t t) {
        Rng rng(tree_seed(config.seed, t));
        std::vector<std::size_t> rows(data.rows());
        if (config.bootstrap)
            for (auto& r : rows) r = static_cast<std::size_t>(rng.below(data.rows()));
        else
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        forest.trees[t] = fit_tree(rows, data, tree_config, rng);
    });
    return forest;
}

/// Fraction of trees voting for each label.
inline std::vector<double> predict_forest(const Forest& forest, std::span<const double> record) {
    if (record.size() != forest.feature_count) throw ArgumentError("record length does not match forest feature count");
    std::vector<std::size_t> votes(forest.n_labels, 0);
    for (const auto& tree : forest.trees) ++votes[tree_vote(tree, record)];
    std::vector<double> out(forest.n_labels);
    for (std::size_t l = 0; l < out.size(); ++l)
        out[l] = static_cast<double>(votes[l]) / static_cast<double>(forest.trees.size());
    return out;
}

/// Mean over trees of (n_node / n_root) * gain credited to each split
/// feature, normalised to sum 1.
inline std::vector<double> impurity_importances(const Forest& forest) {
    std::vector<double> importance(forest.feature_count, 0.0);
    bool any_internal = false;
    for (const auto& tree : forest.trees) {
        const double n_root = static_cast<double>(tree.nodes.front().n_samples);
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) continue;
            any_internal = true;
            importance[node.rule.feature] += static_cast<double>(node.n_samples) / n_root * node.gain;
        }
    }
    double total = 0.0;
    for (auto& v : importance) {
        v /= static_cast<double>(forest.trees.size());
        total += v;
    }
    if (!any_internal || !(total > 0.0)) throw ArgumentError("no splits to attribute");
    for (auto& v : importance) v /= total;
    return importance;
}

}  // namespace ddosml
