#include <ddosml/serialization.hpp>
#include <ddosml/trees.hpp>

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace ddosml;

namespace {

std::vector<std::size_t> all_rows(const LabeledDataset& d) {
    std::vector<std::size_t> rows(d.rows());
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

std::vector<std::uint32_t> all_features(const LabeledDataset& d) {
    std::vector<std::uint32_t> f(d.cols());
    std::iota(f.begin(), f.end(), 0u);
    return f;
}

std::optional<oracle::SplitAnswer> brute_force(const LabeledDataset& d) {
    return oracle::brute_force_split(
        d.rows(), d.cols(), d.label_dict.size(), [&](std::size_t r, std::size_t f) { return d.features(r, f); },
        [&](std::size_t r) { return static_cast<std::size_t>(d.labels[r]); });
}

bool has_conflicting_duplicates(const LabeledDataset& d) {
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = i + 1; j < d.rows(); ++j)
            if (d.labels[i] != d.labels[j] &&
                std::equal(d.features.row(i).begin(), d.features.row(i).end(), d.features.row(j).begin()))
                return true;
    return false;
}

}  // namespace

TEST(Entropy, KnownValues) {
    const Counts pure{8, 0, 0}, even{4, 4}, mixed{2, 2, 4};
    EXPECT_EQ(entropy(pure), 0.0);
    EXPECT_NEAR(entropy(even), 1.0, 1e-12);
    EXPECT_NEAR(entropy(mixed), 1.5, 1e-12);
    const Counts empty{0, 0};
    EXPECT_THROW(entropy(empty), ArgumentError);
}

TEST(Entropy, MatchesOracleAndBounds) {
    std::mt19937_64 gen(1);
    for (int i = 0; i < 200; ++i) {
        Counts c(1 + gen() % 6);
        for (auto& x : c) x = gen() % 20;
        c[0] += 1;
        const double h = entropy(c);
        EXPECT_NEAR(h, oracle::entropy_bits(c), 1e-12);
        EXPECT_GE(h, 0.0);
        EXPECT_LE(h, std::log2(static_cast<double>(c.size())) + 1e-12);
    }
}

TEST(InformationGain, KnownValues) {
    const Counts parent{5, 5};
    const std::vector<Counts> perfect{{5, 0}, {0, 5}};
    EXPECT_NEAR(information_gain(parent, perfect), 1.0, 1e-12);

    const Counts flat{4, 4};
    const std::vector<Counts> useless{{2, 2}, {2, 2}};
    EXPECT_NEAR(information_gain(flat, useless), 0.0, 1e-12);

    const Counts skewed{6, 2};
    const std::vector<Counts> partial{{4, 0}, {2, 2}};
    EXPECT_NEAR(information_gain(skewed, partial), 0.31127812445913283, 1e-12);

    const std::vector<Counts> wrong{{4, 0}, {1, 2}};
    EXPECT_THROW(information_gain(skewed, wrong), ArgumentError);
}

TEST(BestSplit, MidpointBetweenClasses) {
    auto d = support::make({{1}, {2}, {8}, {9}}, {0, 0, 1, 1});
    Rng rng(0);
    auto rows = all_rows(d);
    auto features = all_features(d);
    auto s = find_best_split(rows, d, features, SplitMode::exhaustive, rng);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->rule.feature, 0u);
    EXPECT_EQ(s->rule.threshold, 5.0);
    EXPECT_NEAR(s->gain, 1.0, 1e-12);
}

TEST(BestSplit, PureNodeHasNoSplit) {
    auto d = support::make({{1}, {2}, {3}}, {1, 1, 1});
    Rng rng(0);
    auto rows = all_rows(d);
    auto features = all_features(d);
    EXPECT_FALSE(find_best_split(rows, d, features, SplitMode::exhaustive, rng));
}

TEST(BestSplit, ConstantFeaturesHaveNoSplit) {
    auto d = support::make({{3, 1}, {3, 1}}, {0, 1});
    Rng rng(0);
    auto rows = all_rows(d);
    auto features = all_features(d);
    EXPECT_FALSE(find_best_split(rows, d, features, SplitMode::exhaustive, rng));
}

TEST(BestSplit, MatchesBruteForceOracle) {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 100; ++trial) {
        auto d = support::random_dataset(gen, 2 + gen() % 49, 1 + gen() % 5, 2 + gen() % 2);
        Rng rng(trial);
        auto rows = all_rows(d);
        auto features = all_features(d);
        auto got = find_best_split(rows, d, features, SplitMode::exhaustive, rng);
        auto want = brute_force(d);
        if (!want || d.labels_present() < 2) {
            EXPECT_FALSE(got) << "trial " << trial;
            continue;
        }
        ASSERT_TRUE(got) << "trial " << trial;
        EXPECT_NEAR(got->gain, want->gain, 1e-12) << "trial " << trial;
    }
}

TEST(BestSplit, ExhaustiveDominatesRandomThreshold) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 100; ++trial) {
        auto d = support::random_dataset(gen, 10 + gen() % 40, 1 + gen() % 5, 2, 20);
        auto rows = all_rows(d);
        auto features = all_features(d);
        Rng a(trial), b(trial);
        auto exhaustive = find_best_split(rows, d, features, SplitMode::exhaustive, a);
        auto random = find_best_split(rows, d, features, SplitMode::random_threshold, b);
        if (!random) continue;
        ASSERT_TRUE(exhaustive);
        EXPECT_GE(exhaustive->gain + 1e-12, random->gain);
    }
}

TEST(FeaturesPerSplit, Resolve) {
    EXPECT_EQ(FeaturesPerSplit::sqrt().resolve(87), 9u);
    EXPECT_EQ(FeaturesPerSplit::sqrt().resolve(20), 4u);
    EXPECT_EQ(FeaturesPerSplit::sqrt().resolve(1), 1u);
    EXPECT_EQ(FeaturesPerSplit::all().resolve(20), 20u);
    EXPECT_EQ(FeaturesPerSplit::count(3).resolve(20), 3u);
    EXPECT_THROW(FeaturesPerSplit::count(0).resolve(20), ArgumentError);
    EXPECT_THROW(FeaturesPerSplit::count(21).resolve(20), ArgumentError);
}

TEST(Tree, MemorizesConsistentData) {
    std::mt19937_64 gen(3);
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto d = support::random_dataset(gen, 5 + gen() % 60, 1 + gen() % 5, 2 + gen() % 3, 50);
        if (has_conflicting_duplicates(d)) continue;
        ++checked;
        Rng rng(trial);
        auto tree = fit_tree(all_rows(d), d, TreeConfig{}, rng);
        for (std::size_t r = 0; r < d.rows(); ++r) ASSERT_EQ(tree_vote(tree, d.features.row(r)), d.labels[r]);
    }
    EXPECT_GT(checked, 30);
}

TEST(Tree, SeparatesXor) {
    auto d = support::make({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
    Rng rng(0);
    auto tree = fit_tree(all_rows(d), d, TreeConfig{}, rng);
    for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(tree_vote(tree, d.features.row(r)), d.labels[r]);
}

TEST(Tree, DegenerateInputsGiveSingleLeaf) {
    auto one = support::make({{1, 2}}, {1});
    Rng rng(0);
    auto t1 = fit_tree(all_rows(one), one, TreeConfig{}, rng);
    ASSERT_EQ(t1.nodes.size(), 1u);
    EXPECT_EQ(tree_vote(t1, one.features.row(0)), 1u);

    auto d = support::make({{1}, {2}, {8}, {9}}, {0, 0, 1, 1});
    TreeConfig stump;
    stump.max_depth = 0;
    auto t0 = fit_tree(all_rows(d), d, stump, rng);
    EXPECT_EQ(t0.nodes.size(), 1u);
    EXPECT_EQ(t0.depth(), 0u);

    TreeConfig shallow;
    shallow.max_depth = 1;
    EXPECT_LE(fit_tree(all_rows(d), d, shallow, rng).depth(), 1u);
}

TEST(Tree, LeafProbabilitiesAndTieRouting) {
    auto d = support::make({{1}, {1}, {1}, {1}, {9}}, {0, 0, 0, 1, 2}, {"A", "B", "C"});
    Rng rng(0);
    TreeConfig depth1;
    depth1.max_depth = 1;
    auto tree = fit_tree(all_rows(d), d, depth1, rng);
    ASSERT_EQ(tree.nodes.size(), 3u);
    EXPECT_EQ(tree.nodes[0].rule.threshold, 5.0);
    const std::vector<double> low{1.0}, at{5.0}, high{9.0};
    auto p = predict_tree(tree, low);
    EXPECT_EQ(p, (std::vector<double>{0.75, 0.25, 0.0}));
    EXPECT_EQ(predict_tree(tree, at), p);  // value equal to the threshold goes left
    EXPECT_EQ(predict_tree(tree, high), (std::vector<double>{0.0, 0.0, 1.0}));
}

TEST(Tree, RejectsBadRecords) {
    auto d = support::make({{1}, {9}}, {0, 1});
    Rng rng(0);
    auto tree = fit_tree(all_rows(d), d, TreeConfig{}, rng);
    const std::vector<double> wide{1.0, 2.0}, nan{std::nan("")};
    EXPECT_THROW(predict_tree(tree, wide), ArgumentError);
    EXPECT_THROW(predict_tree(tree, nan), ArgumentError);
}

TEST(Tree, ProbabilitiesSumToOne) {
    std::mt19937_64 gen(8);
    auto d = support::random_dataset(gen, 200, 4, 3);
    Rng rng(1);
    TreeConfig c;
    c.max_depth = 3;
    auto tree = fit_tree(all_rows(d), d, c, rng);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        auto p = predict_tree(tree, d.features.row(r));
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    }
}

TEST(Forest, SingleTreeWithoutBootstrapEqualsTree) {
    std::mt19937_64 gen(4);
    auto d = support::random_dataset(gen, 80, 3, 2);
    ForestConfig fc;
    fc.n_trees = 1;
    fc.bootstrap = false;
    fc.features_per_split = FeaturesPerSplit::all();
    auto forest = fit_forest(d, fc, 1);
    Rng rng(0);
    auto tree = fit_tree(all_rows(d), d, TreeConfig{}, rng);
    EXPECT_EQ(Json(forest.trees[0]).dump(), Json(tree).dump());
}

TEST(Forest, IndependentOfThreadCount) {
    std::mt19937_64 gen(5);
    auto d = support::random_dataset(gen, 150, 6, 3);
    auto config = ForestConfig::random_forest(17);
    config.n_trees = 24;
    const auto one = Json(fit_forest(d, config, 1)).dump();
    EXPECT_EQ(Json(fit_forest(d, config, 4)).dump(), one);
    EXPECT_EQ(Json(fit_forest(d, config, 0)).dump(), one);
    config.seed = 18;
    EXPECT_NE(Json(fit_forest(d, config, 1)).dump(), one);
}

TEST(Forest, HundredTreesMemorizeSeparableData) {
    std::vector<std::vector<double>> rows;
    std::vector<LabelIndex> labels;
    for (int i = 0; i < 60; ++i) {
        rows.push_back({static_cast<double>(i), static_cast<double>((i * 7) % 13), static_cast<double>(i % 3)});
        labels.push_back(i < 30 ? 0 : 1);
    }
    auto d = support::make(rows, labels);
    auto forest = fit_forest(d, ForestConfig::random_forest(1));
    EXPECT_EQ(forest.trees.size(), 100u);
    for (std::size_t r = 0; r < d.rows(); ++r) EXPECT_EQ(argmax(predict_forest(forest, d.features.row(r))), d.labels[r]);
}

TEST(Forest, VoteFractions) {
    // Three hand-built stumps voting A, A, B on every record.
    auto leaf = [](Counts counts) {
        DecisionTree t;
        TreeNode n;
        n.counts = std::move(counts);
        n.n_samples = 1;
        t.nodes.push_back(n);
        t.n_labels = 3;
        t.feature_count = 1;
        return t;
    };
    Forest f;
    f.n_labels = 3;
    f.feature_count = 1;
    f.trees = {leaf({1, 0, 0}), leaf({2, 1, 0}), leaf({0, 1, 0})};
    const std::vector<double> x{0.0};
    auto p = predict_forest(f, x);
    EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-12);
    EXPECT_EQ(p[2], 0.0);
}

TEST(Importance, SingleSplitIsOneHot) {
    auto d = support::make({{5, 1}, {5, 2}, {5, 8}, {5, 9}}, {0, 0, 1, 1});
    ForestConfig fc;
    fc.n_trees = 3;
    fc.bootstrap = false;
    fc.features_per_split = FeaturesPerSplit::all();
    auto imp = impurity_importances(fit_forest(d, fc));
    EXPECT_EQ(imp, (std::vector<double>{0.0, 1.0}));
}

TEST(Importance, NormalizedAndNonNegative) {
    std::mt19937_64 gen(6);
    auto d = support::random_dataset(gen, 120, 5, 3);
    auto config = ForestConfig::extra_trees(2);
    config.n_trees = 20;
    auto imp = impurity_importances(fit_forest(d, config));
    EXPECT_NEAR(std::accumulate(imp.begin(), imp.end(), 0.0), 1.0, 1e-12);
    for (double v : imp) EXPECT_GE(v, 0.0);
}

TEST(Importance, NoSplitsIsAnError) {
    auto d = support::make({{1}, {2}}, {0, 1});
    ForestConfig fc;
    fc.n_trees = 2;
    fc.max_depth = 0;
    EXPECT_THROW(impurity_importances(fit_forest(d, fc)), ArgumentError);
}
