#pragma once

#include <cstdint>
#include <vector>

#include "changeauc/classifier.hpp"
#include "changeauc/null_dist.hpp"
#include "changeauc/types.hpp"

namespace changeauc {

// Classifier scores over the validation window dv, plus the tie-breaking
// jitter that makes them pairwise distinct (position i holds time m+1+i).
struct ScoreSeries {
    std::vector<double> scores;            // raw theta-hat values
    std::vector<double> effective_scores;  // scores + U_i * delta_jit, pairwise distinct
    std::vector<long> global_ranks;        // rank of effective_scores[i], 1..n ascending
    std::uint64_t jitter_seed = 0;
    double delta_jit = 0.0;

    long size() const { return static_cast<long>(scores.size()); }
};

// The AUC process over the candidate grid with its maximum.
struct AucCurve {
    CandidateGrid grid;
    std::vector<double> psi;  // psi[k - grid.lo] = Psi-hat(k)
    double q_hat = 0.0;       // max_k psi
    long r_hat = 0;           // smallest maximizing k
    double scaled_stat = 0.0; // sqrt(T) * (q_hat - 1/2)

    double at(long k) const { return psi[k - grid.lo]; }
};

struct CusumCurve;  // cusum.hpp

struct SingleCpReport {
    bool reject = false;
    double alpha = 0.0;
    double critical_value = 0.0;
    double scaled_stat = 0.0;
    long r_hat = 0;
    AucCurve curve;                 // populated by the AUC scan
    std::vector<double> cusum_phi;  // populated by the CUSUM baseline (k from grid.lo)
};

// Tie-breaking jitter and ranking for raw scores: delta_jit is half the
// smallest nonzero gap between sorted unique scores (2^-40 when all scores
// are equal), effective scores are scores + U_i * delta_jit, so distinct
// scores are never reordered and ties resolve by the seeded uniforms.
ScoreSeries jitter_scores(std::vector<double> scores, std::uint64_t jitter_seed);

// Score every dv row with the fitted model, then jitter and rank.
ScoreSeries score_validation(const Series& series, const SplitPlan& plan,
                             const FittedClassifier& model, std::uint64_t jitter_seed);

// Brute-force O(n^2) evaluation of Psi-hat(k) straight from the defining
// double sum over (left, right) pairs of effective scores. Oracle form.
double auc_at(const ScoreSeries& sc, long k, const SplitPlan& plan);

// Full AUC process via the rank-sum identity with an O(1) update per k;
// equals auc_at pointwise (exactly, since both reduce to integer counts).
AucCurve auc_curve(const ScoreSeries& sc, const CandidateGrid& grid, const SplitPlan& plan);

struct ScanOptions {
    LogisticL1Config logistic;
    ForestConfig forest;
    int threads = 1;
};

// Algorithm: split, train on the endpoints, score the middle, scan the AUC
// process, compare sqrt(T)(Q-hat - 1/2) against the tabulated null quantile.
SingleCpReport test_single(const Series& series, const RunConfig& cfg,
                           const NullQuantileTable& table, const ScanOptions& opts = {});

}  // namespace changeauc
