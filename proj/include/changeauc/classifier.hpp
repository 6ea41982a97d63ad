#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "changeauc/types.hpp"

namespace changeauc {

// Labeled rows for binary classification: features row-major n x p.
struct TrainSet {
    std::vector<double> features;
    std::vector<int> labels;
    long n = 0;
    long p = 0;

    const double* row(long i) const { return features.data() + i * p; }  // i in [0, n)
    void validate() const;  // both classes present, finite features
};

struct LogisticL1Config {
    // L1 penalty weight; unset -> 0.01 * lambda_max where lambda_max is the
    // smallest penalty that zeroes every weight (deterministic default in
    // place of cross-validation).
    std::optional<double> lambda;
    long max_iters = 1000;
    double tol = 1e-7;
    bool standardize = true;
};

struct ForestConfig {
    long n_trees = 100;
    long max_depth = 0;  // 0 = unbounded
    long min_leaf = 5;
    long mtry = 0;  // 0 = floor(sqrt(p))
};

struct LogisticModel {
    std::vector<double> weights;    // on the standardized scale
    double intercept = 0.0;
    std::vector<double> col_mean;   // identity transform when standardize=false
    std::vector<double> col_scale;
    std::vector<long> dropped_columns;  // 0-based constant columns (weight pinned at 0)
    double lambda = 0.0;            // resolved penalty actually used
    long iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // penalized objective per accepted iterate
};

// One node of a CART tree; leaves have feature = -1 and carry the class vote
// (0, 1, or 0.5 on a tied leaf).
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double vote = 0.5;
};

struct Forest {
    std::vector<std::vector<TreeNode>> trees;
};

// Immutable fitted model; predict_proba is pure and reentrant.
struct FittedClassifier {
    ClassifierKind kind = ClassifierKind::constant_guess;
    std::uint64_t train_seed = 0;
    long n_features = 0;
    LogisticModel logistic;
    Forest forest;

    double predict_proba(const double* z, long dim) const;
    double predict_proba(const std::vector<double>& z) const {
        return predict_proba(z.data(), static_cast<long>(z.size()));
    }
};

FittedClassifier train_logistic_l1(const TrainSet& data, const LogisticL1Config& cfg,
                                   std::uint64_t seed);
FittedClassifier train_forest(const TrainSet& data, const ForestConfig& cfg, std::uint64_t seed,
                              int threads = 1);
FittedClassifier make_constant_guess();

// Dispatch on kind with the given per-kind configurations.
FittedClassifier train_classifier(ClassifierKind kind, const TrainSet& data, std::uint64_t seed,
                                  const LogisticL1Config& logistic_cfg = {},
                                  const ForestConfig& forest_cfg = {}, int threads = 1);

// Rows d0 (label 0) and d1 (label 1) of the series, in time order.
TrainSet make_endpoint_train_set(const Series& series, const SplitPlan& plan);

}  // namespace changeauc
