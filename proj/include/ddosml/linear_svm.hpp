#pragma once

// One-vs-rest linear SVM with squared hinge loss:
//
//   minimize  (reg / 2) ||w||^2 + C * sum_i max(0, 1 - y_i (w.x_i + b))^2
//
// per label, solved by cyclic coordinate descent on the primal (one Newton
// step per coordinate, Armijo backtracking). Every accepted step lowers the
// objective, so the per-epoch trace is non-increasing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ddosml/dataset.hpp"
#include "ddosml/error.hpp"
#include "ddosml/parallel.hpp"
#include "ddosml/random.hpp"

namespace ddosml {

struct SvmConfig {
    double C = 1.0;
    double regularization = 1.0;
    std::size_t max_epochs = 1000;
    double tolerance = 1e-6;      // stop when relative epoch improvement falls below this
    double armijo_sigma = 0.01;   // sufficient decrease constant
    double backtrack_beta = 0.5;  // step shrink factor
    std::uint64_t seed = 0;

    void validate() const {
        if (!(C > 0.0)) throw ArgumentError("SVM cost C must be positive");
        if (!(regularization > 0.0)) throw ArgumentError("SVM regularization must be positive");
        if (!(tolerance > 0.0)) throw ArgumentError("SVM tolerance must be positive");
        if (max_epochs == 0) throw ArgumentError("SVM max_epochs must be >= 1");
        if (!(armijo_sigma > 0.0 && armijo_sigma < 1.0)) throw ArgumentError("armijo_sigma must be in (0, 1)");
        if (!(backtrack_beta > 0.0 && backtrack_beta < 1.0)) throw ArgumentError("backtrack_beta must be in (0, 1)");
    }

    bool operator==(const SvmConfig&) const = default;
};

struct LinearSvm {
    std::vector<std::vector<double>> weights;  // [label][feature]
    std::vector<double> biases;
    SvmConfig config;

    std::size_t n_labels() const noexcept { return biases.size(); }
    std::size_t feature_count() const noexcept { return weights.empty() ? 0 : weights.front().size(); }

    bool operator==(const LinearSvm&) const = default;
};

/// Objective value per accepted epoch, starting with the zero model.
struct SvmFitTrace {
    std::vector<std::vector<double>> objective;  // [label][epoch]
};

/// One binary subproblem: rows of `x` with targets +1 / -1.
struct BinaryProblem {
    const Matrix& x;
    std::span<const double> y;
};

inline double svm_objective(std::span<const double> w, double b, double C, double regularization,
                            const BinaryProblem& p) {
    if (w.size() != p.x.cols() || p.y.size() != p.x.rows()) throw ArgumentError("SVM objective dimension mismatch");
    double reg = 0.0;
    for (double v : w) reg += v * v;
    double loss = 0.0;
    for (std::size_t i = 0; i < p.x.rows(); ++i) {
        const auto row = p.x.row(i);
        double f = b;
        for (std::size_t j = 0; j < w.size(); ++j) f += w[j] * row[j];
        const double m = 1.0 - p.y[i] * f;
        if (m > 0.0) loss += m * m;
    }
    return 0.5 * regularization * reg + C * loss;
}

/// Same with regularization 1.
inline double svm_objective(std::span<const double> w, double b, double C, const BinaryProblem& p) {
    return svm_objective(w, b, C, 1.0, p);
}

/// Gradient of svm_objective; the last entry is d/db.
inline std::vector<double> svm_gradient(std::span<const double> w, double b, double C, double regularization,
                                        const BinaryProblem& p) {
    std::vector<double> g(w.size() + 1, 0.0);
    for (std::size_t j = 0; j < w.size(); ++j) g[j] = regularization * w[j];
    for (std::size_t i = 0; i < p.x.rows(); ++i) {
        const auto row = p.x.row(i);
        double f = b;
        for (std::size_t j = 0; j < w.size(); ++j) f += w[j] * row[j];
        const double m = 1.0 - p.y[i] * f;
        if (m <= 0.0) continue;
        const double coef = -2.0 * C * p.y[i] * m;
        for (std::size_t j = 0; j < w.size(); ++j) g[j] += coef * row[j];
        g.back() += coef;
    }
    return g;
}

namespace detail {

/// Column-major copy of the training rows plus the coordinate descent loop
/// for one label.
class SquaredHingeSolver {
public:
    SquaredHingeSolver(const Matrix& x, std::vector<double> y, const SvmConfig& config)
        : n_(x.rows()), d_(x.cols()), columns_(d_ + 1, std::vector<double>(n_)), y_(std::move(y)), config_(config) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < d_; ++j) columns_[j][i] = x(i, j);
            columns_[d_][i] = 1.0;  // bias column
        }
    }

    void solve(std::vector<double>& w, double& b, Rng& rng, std::vector<double>& trace) {
        std::vector<double> theta(d_ + 1, 0.0);  // weights then bias
        slack_.assign(n_, 1.0);
        double objective = config_.C * static_cast<double>(n_);
        trace.assign(1, objective);
        std::vector<std::size_t> order(d_ + 1);
        for (std::size_t epoch = 0; epoch < config_.max_epochs; ++epoch) {
            const std::vector<double> previous = theta;
            for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
            rng.shuffle(std::span<std::size_t>(order));
            for (auto j : order) update_coordinate(j, theta);

            refresh_slack(theta);
            const double next = exact_objective(theta);
            if (next > objective) {
                // Rounding drift only; keep the last committed epoch.
                theta = previous;
                break;
            }
            const double improvement = objective - next;
            objective = next;
            trace.push_back(objective);
            if (improvement <= config_.tolerance * std::max(1.0, objective)) break;
        }
        w.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d_));
        b = theta.back();
    }

private:
    double reg_of(std::size_t j) const { return j == d_ ? 0.0 : config_.regularization; }

    void update_coordinate(std::size_t j, std::vector<double>& theta) {
        const auto& col = columns_[j];
        const double reg = reg_of(j);
        double grad = reg * theta[j], hess = reg;
        for (std::size_t i = 0; i < n_; ++i) {
            if (slack_[i] <= 0.0) continue;
            grad -= 2.0 * config_.C * y_[i] * col[i] * slack_[i];
            hess += 2.0 * config_.C * col[i] * col[i];
        }
        if (!(hess > 0.0) || grad == 0.0) return;
        const double direction = -grad / hess;
        double step = 1.0;
        for (int attempt = 0; attempt < 40; ++attempt, step *= config_.backtrack_beta) {
            const double z = step * direction;
            double change = reg * (theta[j] * z + 0.5 * z * z);
            for (std::size_t i = 0; i < n_; ++i) {
                const double before = slack_[i] > 0.0 ? slack_[i] * slack_[i] : 0.0;
                const double s = slack_[i] - z * y_[i] * col[i];
                const double after = s > 0.0 ? s * s : 0.0;
                change += config_.C * (after - before);
            }
            if (change <= -config_.armijo_sigma * z * z) {
                theta[j] += z;
                for (std::size_t i = 0; i < n_; ++i) slack_[i] -= z * y_[i] * col[i];
                return;
            }
        }
    }

    void refresh_slack(const std::vector<double>& theta) {
        for (std::size_t i = 0; i < n_; ++i) {
            double f = 0.0;
            for (std::size_t j = 0; j <= d_; ++j) f += theta[j] * columns_[j][i];
            slack_[i] = 1.0 - y_[i] * f;
        }
    }

    double exact_objective(const std::vector<double>& theta) const {
        double reg = 0.0;
        for (std::size_t j = 0; j < d_; ++j) reg += theta[j] * theta[j];
        double loss = 0.0;
        for (double s : slack_)
            if (s > 0.0) loss += s * s;
        return 0.5 * config_.regularization * reg + config_.C * loss;
    }

    std::size_t n_, d_;
    std::vector<std::vector<double>> columns_;
    std::vector<double> y_;
    std::vector<double> slack_;
    const SvmConfig& config_;
};

}  // namespace detail

/// Trains one binary squared-hinge SVM per label of the dictionary. Rows are
/// put in canonical (lexicographic) order first, so the result does not
/// depend on the order of `train`.
inline LinearSvm fit_svm_ovr(const LabeledDataset& train, const SvmConfig& config, SvmFitTrace* trace = nullptr,
                             std::size_t threads = 0) {
    config.validate();
    if (train.labels_present() < 2) throw ArgumentError("SVM needs at least 2 labels present");
    for (double v : train.features.data())
        if (!std::isfinite(v)) throw ArgumentError("non-finite feature value in SVM training data");

    std::vector<std::size_t> order(train.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        const auto ra = train.features.row(a), rb = train.features.row(b);
        if (auto c = std::lexicographical_compare_three_way(ra.begin(), ra.end(), rb.begin(), rb.end()); c != 0)
            return c < 0;
        return train.labels[a] < train.labels[b];
    });
    const LabeledDataset canonical = train.subset(order);

    const std::size_t k = train.label_dict.size();
    LinearSvm model;
    model.config = config;
    model.weights.assign(k, std::vector<double>(train.cols(), 0.0));
    model.biases.assign(k, 0.0);
    SvmFitTrace local;
    local.objective.resize(k);
    parallel_for(k, threads, [&](std::size_t c) {
        std::vector<double> y(canonical.rows());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = canonical.labels[i] == c ? 1.0 : -1.0;
        detail::SquaredHingeSolver solver(canonical.features, std::move(y), config);
        Rng rng(derive_seed(config.seed, c));
        solver.solve(model.weights[c], model.biases[c], rng, local.objective[c]);
    });
    if (trace) *trace = std::move(local);
    return model;
}

/// w_c . x + b_c for every label.
inline std::vector<double> svm_decision_scores(const LinearSvm& model, std::span<const double> record) {
    if (record.size() != model.feature_count()) throw ArgumentError("record length does not match model");
    require_no_nan(record);
    std::vector<double> scores(model.n_labels());
    for (std::size_t c = 0; c < scores.size(); ++c) {
        double s = model.biases[c];
        for (std::size_t j = 0; j < record.size(); ++j) s += model.weights[c][j] * record[j];
        scores[c] = s;
    }
    return scores;
}

}  // namespace ddosml
