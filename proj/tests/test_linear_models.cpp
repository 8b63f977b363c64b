#include <ddosml/evaluation.hpp>
#include <ddosml/linear_svm.hpp>
#include <ddosml/naive_bayes.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace ddosml;

namespace {

LabeledDataset gaussian_blobs(std::mt19937_64& gen, std::size_t per_label, std::size_t cols, std::size_t labels,
                              double spread) {
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<LabelIndex> y;
    for (std::size_t l = 0; l < labels; ++l)
        for (std::size_t i = 0; i < per_label; ++i) {
            std::vector<double> row(cols);
            for (std::size_t c = 0; c < cols; ++c) row[c] = spread * (c % labels == l ? 1.0 : -1.0) + noise(gen);
            rows.push_back(row);
            y.push_back(static_cast<LabelIndex>(l));
        }
    std::vector<std::string> names;
    for (std::size_t l = 0; l < labels; ++l) names.push_back("L" + std::to_string(l));
    return support::make(rows, y, names);
}

// Log joint density of a record under independent Gaussians with the given
// per-label moments, straight from the density formula.
double log_joint(double prior, const std::vector<double>& mean, const std::vector<double>& var,
                 std::span<const double> x) {
    double lp = std::log(prior);
    for (std::size_t f = 0; f < x.size(); ++f)
        lp += std::log(std::exp(-(x[f] - mean[f]) * (x[f] - mean[f]) / (2 * var[f])) /
                       std::sqrt(2 * std::numbers::pi * var[f]));
    return lp;
}

}  // namespace

TEST(NaiveBayes, ExactMomentsOnFourPoints) {
    auto d = support::make({{1}, {3}, {5}, {7}}, {0, 0, 1, 1});
    auto m = fit_gaussian_nb(d);
    EXPECT_EQ(m.priors, (std::vector<double>{0.5, 0.5}));
    EXPECT_NEAR(m.means[0][0], 2.0, 1e-12);
    EXPECT_NEAR(m.means[1][0], 6.0, 1e-12);
    EXPECT_NEAR(m.variances[0][0], 1.0, 1e-6);
    EXPECT_NEAR(m.variances[1][0], 1.0, 1e-6);
    auto raw = estimate_class_moments(d);
    EXPECT_EQ(raw.variances[0][0], 1.0);
    // Smoothing is the scale times the largest variance over the whole column.
    EXPECT_NEAR(m.smoothing, 1e-9 * 5.0, 1e-18);

    const std::vector<double> mid{4.0}, left{3.0}, right{6.5};
    auto p = gnb_posteriors(m, mid);
    EXPECT_NEAR(p[0], 0.5, 1e-12);
    EXPECT_EQ(argmax(p), 0u);
    EXPECT_EQ(argmax(gnb_posteriors(m, left)), 0u);
    EXPECT_EQ(argmax(gnb_posteriors(m, right)), 1u);
}

TEST(NaiveBayes, ConstantColumnsStayFinite) {
    auto d = support::make({{1, 0}, {1, 0}, {2, 0}, {2, 0}}, {0, 0, 1, 1});
    auto m = fit_gaussian_nb(d);
    const std::vector<double> x{1.0, 0.0};
    for (double v : gnb_log_posteriors(m, x)) EXPECT_TRUE(std::isfinite(v));
}

TEST(NaiveBayes, AbsentLabelNeverPredicted) {
    auto d = support::make({{1}, {2}, {9}}, {0, 0, 2}, {"A", "B", "C"});
    auto m = fit_gaussian_nb(d);
    EXPECT_EQ(m.priors[1], 0.0);
    for (double x : {-5.0, 1.5, 5.0, 20.0}) {
        const std::vector<double> r{x};
        auto p = gnb_posteriors(m, r);
        EXPECT_NE(argmax(p), 1u);
        EXPECT_EQ(p[1], 0.0);
    }
}

TEST(NaiveBayes, MatchesDensityOracle) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 30; ++trial) {
        auto d = gaussian_blobs(gen, 30 + gen() % 30, 1 + gen() % 4, 2 + gen() % 2, 1.0);
        auto m = fit_gaussian_nb(d);
        const std::size_t k = d.label_dict.size();
        // Oracle moments straight from the rows.
        std::vector<std::vector<double>> mean(k, std::vector<double>(d.cols(), 0.0)), var = mean;
        std::vector<double> n(k, 0.0), global_mean(d.cols(), 0.0), global_var(d.cols(), 0.0);
        for (std::size_t r = 0; r < d.rows(); ++r) {
            n[d.labels[r]] += 1;
            for (std::size_t c = 0; c < d.cols(); ++c) {
                mean[d.labels[r]][c] += d.features(r, c);
                global_mean[c] += d.features(r, c) / d.rows();
            }
        }
        for (std::size_t l = 0; l < k; ++l)
            for (auto& v : mean[l]) v /= n[l];
        for (std::size_t r = 0; r < d.rows(); ++r)
            for (std::size_t c = 0; c < d.cols(); ++c) {
                const double dv = d.features(r, c) - mean[d.labels[r]][c];
                var[d.labels[r]][c] += dv * dv / n[d.labels[r]];
                const double dg = d.features(r, c) - global_mean[c];
                global_var[c] += dg * dg / d.rows();
            }
        const double eps = 1e-9 * *std::max_element(global_var.begin(), global_var.end());
        for (auto& row : var)
            for (auto& v : row) v += eps;

        for (std::size_t r = 0; r < d.rows(); ++r) {
            std::vector<double> lj(k);
            for (std::size_t l = 0; l < k; ++l) lj[l] = log_joint(n[l] / d.rows(), mean[l], var[l], d.features.row(r));
            const double top = *std::max_element(lj.begin(), lj.end());
            double z = 0.0;
            for (double v : lj) z += std::exp(v - top);
            auto p = gnb_posteriors(m, d.features.row(r));
            for (std::size_t l = 0; l < k; ++l) EXPECT_NEAR(p[l], std::exp(lj[l] - top) / z, 1e-9);
            EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
        }
    }
}

TEST(NaiveBayes, ArgmaxInvariantToConstantShift) {
    std::mt19937_64 gen(2);
    auto d = gaussian_blobs(gen, 40, 3, 3, 2.0);
    auto m = fit_gaussian_nb(d);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        auto s = gnb_log_posteriors(m, d.features.row(r));
        auto shifted = s;
        for (auto& v : shifted) v += 123.5;
        EXPECT_EQ(argmax(s), argmax(shifted));
    }
}

TEST(SvmObjective, ClosedFormCases) {
    Matrix x(10, 2, 0.0);
    std::vector<double> y(10);
    for (std::size_t i = 0; i < 10; ++i) {
        x(i, 0) = static_cast<double>(i) - 4.5;
        x(i, 1) = 1.0;
        y[i] = i < 5 ? -1.0 : 1.0;
    }
    BinaryProblem p{x, y};
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_EQ(svm_objective(zero, 0.0, 1.0, p), 10.0);
    EXPECT_EQ(svm_objective(zero, 0.0, 2.5, p), 25.0);

    const std::vector<double> w{4.0, 0.0};  // every margin |4 (i - 4.5)| >= 2
    EXPECT_NEAR(svm_objective(w, 0.0, 1.0, p), 8.0, 1e-12);
}

TEST(SvmObjective, GradientMatchesFiniteDifferences) {
    std::mt19937_64 gen(13);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 15, d = 3;
        Matrix x(n, d);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < d; ++c) x(i, c) = normal(gen);
            y[i] = normal(gen) > 0 ? 1.0 : -1.0;
        }
        BinaryProblem p{x, y};
        std::vector<double> theta(d + 1);
        for (auto& t : theta) t = 0.5 * normal(gen);
        const double C = 0.5 + trial % 3, reg = 1.0 + trial % 2;
        auto f = [&](const std::vector<double>& t) {
            return svm_objective(std::span<const double>(t.data(), d), t[d], C, reg, p);
        };
        auto g = svm_gradient(std::span<const double>(theta.data(), d), theta[d], C, reg, p);
        ASSERT_EQ(g.size(), d + 1);
        for (std::size_t j = 0; j <= d; ++j) {
            const double fd = oracle::central_difference(f, theta, j, 1e-6);
            EXPECT_NEAR(g[j], fd, 1e-4 * std::max(1.0, std::abs(fd))) << "trial " << trial << " coord " << j;
        }
    }
}

TEST(SvmFit, ObjectiveTraceNonIncreasing) {
    std::mt19937_64 gen(17);
    auto d = gaussian_blobs(gen, 60, 4, 3, 0.7);
    SvmFitTrace trace;
    fit_svm_ovr(d, SvmConfig{}, &trace);
    ASSERT_EQ(trace.objective.size(), 3u);
    for (const auto& obj : trace.objective) {
        ASSERT_GE(obj.size(), 2u);
        EXPECT_EQ(obj.front(), static_cast<double>(d.rows()));
        for (std::size_t e = 1; e < obj.size(); ++e) EXPECT_LE(obj[e], obj[e - 1]);
    }
}

TEST(SvmFit, SeparableOneDimension) {
    std::vector<std::vector<double>> rows;
    std::vector<LabelIndex> y;
    for (int i = 0; i < 40; ++i) {
        rows.push_back({i < 20 ? -2.0 - i * 0.1 : 2.0 + i * 0.1});
        y.push_back(i < 20 ? 0 : 1);
    }
    auto d = support::make(rows, y);
    SvmFitTrace trace;
    auto model = fit_svm_ovr(d, SvmConfig{}, &trace);
    for (std::size_t r = 0; r < d.rows(); ++r) EXPECT_EQ(argmax(svm_decision_scores(model, d.features.row(r))), y[r]);
    for (const auto& obj : trace.objective) EXPECT_LT(obj.back(), 40.0);
    EXPECT_EQ(model.config.C, 1.0);
    EXPECT_EQ(model.config.regularization, 1.0);
}

TEST(SvmFit, ReachesStationaryPoint) {
    std::mt19937_64 gen(19);
    auto d = gaussian_blobs(gen, 50, 3, 2, 0.5);
    SvmConfig config;
    config.tolerance = 1e-10;
    config.max_epochs = 5000;
    auto model = fit_svm_ovr(d, config);
    for (std::size_t c = 0; c < 2; ++c) {
        std::vector<double> y(d.rows());
        for (std::size_t r = 0; r < d.rows(); ++r) y[r] = d.labels[r] == c ? 1.0 : -1.0;
        BinaryProblem p{d.features, y};
        auto g = svm_gradient(model.weights[c], model.biases[c], 1.0, 1.0, p);
        for (double v : g) EXPECT_NEAR(v, 0.0, 1e-3);
    }
}

TEST(SvmFit, DeterministicAndOrderFree) {
    std::mt19937_64 gen(23);
    auto d = gaussian_blobs(gen, 40, 3, 3, 1.0);
    SvmConfig config;
    config.seed = 5;
    auto a = fit_svm_ovr(d, config, nullptr, 1);
    auto b = fit_svm_ovr(d, config, nullptr, 3);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.biases, b.biases);

    std::vector<std::size_t> order(d.rows());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen);
    auto c = fit_svm_ovr(d.subset(order), config);
    EXPECT_EQ(c.weights, a.weights);
    EXPECT_EQ(c.biases, a.biases);
}

TEST(SvmFit, RejectsBadInput) {
    auto one_label = support::make({{1}, {2}}, {0, 0});
    EXPECT_THROW(fit_svm_ovr(one_label, SvmConfig{}), ArgumentError);
    auto d = support::make({{1}, {2}}, {0, 1});
    SvmConfig bad;
    bad.C = 0.0;
    EXPECT_THROW(fit_svm_ovr(d, bad), ArgumentError);
}

TEST(SvmScores, LinearDecisionAndTies) {
    LinearSvm m;
    m.weights = {{-1.0}, {1.0}};
    m.biases = {0.0, 0.0};
    const std::vector<double> pos{2.0}, zero{0.0}, neg{-3.0};
    EXPECT_EQ(svm_decision_scores(m, pos), (std::vector<double>{-2.0, 2.0}));
    EXPECT_EQ(argmax(svm_decision_scores(m, pos)), 1u);
    EXPECT_EQ(svm_decision_scores(m, zero), (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(argmax(svm_decision_scores(m, zero)), 0u);
    EXPECT_EQ(argmax(svm_decision_scores(m, neg)), 0u);
    const std::vector<double> wide{1.0, 2.0}, nan{std::nan("")};
    EXPECT_THROW(svm_decision_scores(m, wide), ArgumentError);
    EXPECT_THROW(svm_decision_scores(m, nan), ArgumentError);
}

TEST(SvmScores, ScalingOneLabelOnlyMattersAcrossTheBoundary) {
    LinearSvm m;
    m.weights = {{1.0}, {0.0}};
    m.biases = {-1.0, 0.0};  // label 0 wins when x > 1
    const std::vector<double> below{0.5}, above{1.5};
    EXPECT_EQ(argmax(svm_decision_scores(m, below)), 1u);
    EXPECT_EQ(argmax(svm_decision_scores(m, above)), 0u);
    m.weights[0][0] *= 2.0;
    m.biases[0] *= 2.0;
    EXPECT_EQ(svm_decision_scores(m, above)[0], 1.0);
    EXPECT_EQ(argmax(svm_decision_scores(m, below)), 1u);
    EXPECT_EQ(argmax(svm_decision_scores(m, above)), 0u);
}
