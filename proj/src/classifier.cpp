#include "changeauc/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "changeauc/parallel.hpp"
#include "changeauc/rng.hpp"

namespace changeauc {

void TrainSet::validate() const {
    if (n <= 0 || p <= 0 || features.size() != static_cast<std::size_t>(n) * p ||
        labels.size() != static_cast<std::size_t>(n))
        throw Error(ErrorCode::invalid_argument, "malformed training set");
    bool has0 = false, has1 = false;
    for (int y : labels) {
        if (y == 0) has0 = true;
        else if (y == 1) has1 = true;
        else throw Error(ErrorCode::invalid_argument, "labels must be 0 or 1");
    }
    if (!has0 || !has1)
        throw Error(ErrorCode::invalid_argument, "both classes must be present");
    for (double v : features)
        if (!std::isfinite(v))
            throw Error(ErrorCode::invalid_argument, "non-finite feature value");
}

namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

// log(1 + e^a), stable for large |a|.
double log1pexp(double a) {
    return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace

FittedClassifier train_logistic_l1(const TrainSet& data, const LogisticL1Config& cfg,
                                   std::uint64_t seed) {
    data.validate();
    if (cfg.lambda && *cfg.lambda < 0.0)
        throw Error(ErrorCode::invalid_argument, "lambda must be nonnegative");
    if (cfg.max_iters < 1 || !(cfg.tol > 0.0))
        throw Error(ErrorCode::invalid_argument, "bad logistic config");

    const long n = data.n, p = data.p;
    LogisticModel model;
    model.col_mean.assign(p, 0.0);
    model.col_scale.assign(p, 1.0);

    // Standardize columns; constant columns cannot be scaled and are dropped
    // (weight pinned at zero) rather than failing the fit.
    std::vector<bool> active(p, true);
    if (cfg.standardize) {
        for (long j = 0; j < p; ++j) {
            double mean = 0.0;
            for (long i = 0; i < n; ++i) mean += data.features[i * p + j];
            mean /= n;
            double var = 0.0;
            for (long i = 0; i < n; ++i) {
                double d = data.features[i * p + j] - mean;
                var += d * d;
            }
            double sd = std::sqrt(var / n);
            model.col_mean[j] = mean;
            if (sd < 1e-12 * (1.0 + std::abs(mean)) || sd == 0.0) {
                active[j] = false;
                model.dropped_columns.push_back(j);
                model.col_scale[j] = 1.0;
                std::fprintf(stderr,
                             "warning [degenerate-features]: column %ld is constant; "
                             "dropped from the logistic fit\n",
                             j);
            } else {
                model.col_scale[j] = sd;
            }
        }
    }

    // Standardized design matrix (dropped columns zeroed).
    std::vector<double> x(static_cast<std::size_t>(n) * p);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < p; ++j)
            x[i * p + j] = active[j]
                               ? (data.features[i * p + j] - model.col_mean[j]) / model.col_scale[j]
                               : 0.0;

    double ybar = 0.0;
    for (int y : data.labels) ybar += y;
    ybar /= n;
    double b = std::log(ybar / (1.0 - ybar));  // classes both present -> ybar in (0,1)

    // Gradient at (w=0, b=logit(ybar)) has residual (ybar - y); its largest
    // absolute coordinate is the smallest penalty that keeps all weights at 0.
    double lambda_max = 0.0;
    for (long j = 0; j < p; ++j) {
        double g = 0.0;
        for (long i = 0; i < n; ++i) g += x[i * p + j] * (ybar - data.labels[i]);
        lambda_max = std::max(lambda_max, std::abs(g) / n);
    }
    model.lambda = cfg.lambda ? *cfg.lambda : 0.01 * lambda_max;

    std::vector<double> w(p, 0.0);
    std::vector<double> linear(n, b), prob(n), grad(p), w_next(p);

    auto smooth_loss = [&](const std::vector<double>& lin) {
        double loss = 0.0;
        for (long i = 0; i < n; ++i) loss += log1pexp(lin[i]) - data.labels[i] * lin[i];
        return loss / n;
    };
    auto l1 = [&](const std::vector<double>& ww) {
        double s = 0.0;
        for (double v : ww) s += std::abs(v);
        return s;
    };

    double f = smooth_loss(linear);
    double objective = f + model.lambda * l1(w);
    model.objective_trace.push_back(objective);

    // Proximal gradient (ISTA) with backtracking line search: each accepted
    // step satisfies the quadratic upper-bound condition, so the penalized
    // objective never increases.
    double step = 1.0;
    std::vector<double> lin_next(n);
    for (long iter = 0; iter < cfg.max_iters; ++iter) {
        for (long i = 0; i < n; ++i) prob[i] = sigmoid(linear[i]);
        std::fill(grad.begin(), grad.end(), 0.0);
        for (long i = 0; i < n; ++i) {
            double r = (prob[i] - data.labels[i]) / n;
            const double* xi = &x[i * p];
            for (long j = 0; j < p; ++j) grad[j] += r * xi[j];
        }
        double grad_b = 0.0;
        for (long i = 0; i < n; ++i) grad_b += prob[i] - data.labels[i];
        grad_b /= n;

        double f_next = 0.0, b_next = b;
        bool accepted = false;
        for (int halvings = 0; halvings < 64; ++halvings) {
            for (long j = 0; j < p; ++j)
                w_next[j] = active[j] ? soft_threshold(w[j] - step * grad[j], step * model.lambda)
                                      : 0.0;
            b_next = b - step * grad_b;
            for (long i = 0; i < n; ++i) {
                double a = b_next;
                const double* xi = &x[i * p];
                for (long j = 0; j < p; ++j) a += w_next[j] * xi[j];
                lin_next[i] = a;
            }
            f_next = smooth_loss(lin_next);
            double inner = (b_next - b) * grad_b, sq = (b_next - b) * (b_next - b);
            for (long j = 0; j < p; ++j) {
                double d = w_next[j] - w[j];
                inner += d * grad[j];
                sq += d * d;
            }
            if (f_next <= f + inner + sq / (2.0 * step) + 1e-12) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: numerically stationary

        double delta_max = std::abs(b_next - b);
        double param_max = std::abs(b_next);
        for (long j = 0; j < p; ++j) {
            delta_max = std::max(delta_max, std::abs(w_next[j] - w[j]));
            param_max = std::max(param_max, std::abs(w_next[j]));
        }
        w.swap(w_next);
        b = b_next;
        linear.swap(lin_next);
        f = f_next;
        objective = f + model.lambda * l1(w);
        model.objective_trace.push_back(objective);
        model.iterations = iter + 1;
        step *= 1.25;  // optimistic growth; backtracking shrinks as needed

        if (delta_max <= cfg.tol * (1.0 + param_max)) {
            model.converged = true;
            break;
        }
    }

    model.weights = std::move(w);
    model.intercept = b;

    FittedClassifier fitted;
    fitted.kind = ClassifierKind::logistic_l1;
    fitted.train_seed = seed;
    fitted.n_features = p;
    fitted.logistic = std::move(model);
    return fitted;
}

namespace {

struct TreeBuilder {
    const TrainSet& data;
    const ForestConfig& cfg;
    long mtry;
    std::vector<TreeNode>& nodes;
    Rng& rng;
    std::vector<long> feature_pool;      // partially shuffled per node
    std::vector<std::pair<double, int>> scratch;  // (value, label) sort buffer

    TreeBuilder(const TrainSet& d, const ForestConfig& c, long mt, std::vector<TreeNode>& out,
                Rng& r)
        : data(d), cfg(c), mtry(mt), nodes(out), rng(r) {
        feature_pool.resize(d.p);
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
    }

    // Gini-weighted goodness of a (left, right) count split; larger is purer.
    static double side_score(long c0, long c1) {
        double total = static_cast<double>(c0 + c1);
        return (static_cast<double>(c0) * c0 + static_cast<double>(c1) * c1) / total;
    }

    int build(std::vector<long>& idx, long lo, long hi, long depth) {
        long size = hi - lo;
        long count1 = 0;
        for (long i = lo; i < hi; ++i) count1 += data.labels[idx[i]];
        long count0 = size - count1;

        TreeNode node;
        node.vote = count1 * 2 > size ? 1.0 : (count1 * 2 < size ? 0.0 : 0.5);
        int node_id = static_cast<int>(nodes.size());
        nodes.push_back(node);

        bool splittable = count0 > 0 && count1 > 0 && size >= 2 * cfg.min_leaf &&
                          (cfg.max_depth == 0 || depth < cfg.max_depth);
        if (!splittable) return node_id;

        // Draw mtry distinct candidate features (partial Fisher-Yates).
        for (long t = 0; t < mtry; ++t) {
            long j = t + static_cast<long>(rng.below(data.p - t));
            std::swap(feature_pool[t], feature_pool[j]);
        }

        double parent_score = side_score(count0, count1);
        double best_gain = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        for (long t = 0; t < mtry; ++t) {
            long feature = feature_pool[t];
            scratch.clear();
            for (long i = lo; i < hi; ++i)
                scratch.emplace_back(data.features[idx[i] * data.p + feature],
                                     data.labels[idx[i]]);
            std::sort(scratch.begin(), scratch.end());
            long l0 = 0, l1 = 0;
            for (long i = 0; i + 1 < size; ++i) {
                if (scratch[i].second) ++l1;
                else ++l0;
                long nl = i + 1, nr = size - nl;
                if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
                if (scratch[i].first == scratch[i + 1].first) continue;  // no boundary here
                double gain =
                    side_score(l0, l1) + side_score(count0 - l0, count1 - l1) - parent_score;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(feature);
                    best_threshold = scratch[i].first +
                                     (scratch[i + 1].first - scratch[i].first) / 2.0;
                }
            }
        }
        if (best_feature < 0) return node_id;  // all candidates constant or unprofitable

        auto mid = std::partition(idx.begin() + lo, idx.begin() + hi, [&](long row) {
            return data.features[row * data.p + best_feature] <= best_threshold;
        });
        long split = mid - idx.begin();
        if (split == lo || split == hi) return node_id;  // numerically degenerate

        nodes[node_id].feature = best_feature;
        nodes[node_id].threshold = best_threshold;
        int left = build(idx, lo, split, depth + 1);
        int right = build(idx, split, hi, depth + 1);
        nodes[node_id].left = left;
        nodes[node_id].right = right;
        return node_id;
    }
};

double tree_vote(const std::vector<TreeNode>& nodes, const double* z) {
    int cur = 0;
    while (nodes[cur].feature >= 0)
        cur = z[nodes[cur].feature] <= nodes[cur].threshold ? nodes[cur].left : nodes[cur].right;
    return nodes[cur].vote;
}

}  // namespace

FittedClassifier train_forest(const TrainSet& data, const ForestConfig& cfg, std::uint64_t seed,
                              int threads) {
    data.validate();
    if (cfg.n_trees < 1 || cfg.min_leaf < 1 || cfg.max_depth < 0 || cfg.mtry < 0)
        throw Error(ErrorCode::invalid_argument, "bad forest config");

    const long p = data.p;
    long mtry = cfg.mtry > 0 ? std::min(cfg.mtry, p)
                             : std::max<long>(1, static_cast<long>(std::floor(std::sqrt(
                                                     static_cast<double>(p)))));

    FittedClassifier fitted;
    fitted.kind = ClassifierKind::random_forest;
    fitted.train_seed = seed;
    fitted.n_features = p;
    fitted.forest.trees.resize(cfg.n_trees);

    parallel_for(cfg.n_trees, threads, [&](long t) {
        Rng rng(child_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<long> idx(data.n);
        for (long i = 0; i < data.n; ++i)
            idx[i] = static_cast<long>(rng.below(static_cast<std::uint64_t>(data.n)));
        // A bootstrap sample may miss one class entirely; the root then votes
        // the majority and the tree is a stump — no special casing needed.
        std::vector<TreeNode>& nodes = fitted.forest.trees[t];
        TreeBuilder builder(data, cfg, mtry, nodes, rng);
        builder.build(idx, 0, data.n, 0);
    });
    return fitted;
}

FittedClassifier make_constant_guess() {
    FittedClassifier fitted;
    fitted.kind = ClassifierKind::constant_guess;
    fitted.n_features = 0;  // accepts any dimension
    return fitted;
}

double FittedClassifier::predict_proba(const double* z, long dim) const {
    if (kind != ClassifierKind::constant_guess && dim != n_features)
        throw Error(ErrorCode::dim_mismatch,
                    "predict_proba: expected " + std::to_string(n_features) +
                        " features, got " + std::to_string(dim));
    switch (kind) {
        case ClassifierKind::constant_guess:
            return 0.5;
        case ClassifierKind::logistic_l1: {
            double a = logistic.intercept;
            for (long j = 0; j < n_features; ++j) {
                if (logistic.weights[j] == 0.0) continue;
                a += logistic.weights[j] * (z[j] - logistic.col_mean[j]) / logistic.col_scale[j];
            }
            return sigmoid(a);
        }
        case ClassifierKind::random_forest: {
            double sum = 0.0;
            for (const auto& tree : forest.trees) sum += tree_vote(tree, z);
            return sum / static_cast<double>(forest.trees.size());
        }
    }
    return 0.5;
}

FittedClassifier train_classifier(ClassifierKind kind, const TrainSet& data, std::uint64_t seed,
                                  const LogisticL1Config& logistic_cfg,
                                  const ForestConfig& forest_cfg, int threads) {
    switch (kind) {
        case ClassifierKind::logistic_l1: return train_logistic_l1(data, logistic_cfg, seed);
        case ClassifierKind::random_forest: return train_forest(data, forest_cfg, seed, threads);
        case ClassifierKind::constant_guess: return make_constant_guess();
    }
    throw Error(ErrorCode::invalid_argument, "unknown classifier kind");
}

TrainSet make_endpoint_train_set(const Series& series, const SplitPlan& plan) {
    TrainSet set;
    set.n = 2 * plan.m;
    set.p = series.p();
    set.features.reserve(static_cast<std::size_t>(set.n) * set.p);
    set.labels.reserve(set.n);
    for (long t = plan.d0_lo; t <= plan.d0_hi; ++t) {
        set.features.insert(set.features.end(), series.row(t), series.row(t) + series.p());
        set.labels.push_back(0);
    }
    for (long t = plan.d1_lo; t <= plan.d1_hi; ++t) {
        set.features.insert(set.features.end(), series.row(t), series.row(t) + series.p());
        set.labels.push_back(1);
    }
    return set;
}

}  // namespace changeauc
