#include "changeauc/auc_scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "changeauc/rng.hpp"

namespace changeauc {


ScoreSeries jitter_scores(std::vector<double> scores, std::uint64_t jitter_seed) {
    ScoreSeries sc;
    sc.jitter_seed = jitter_seed;
    sc.scores = std::move(scores);
    const long n = sc.size();

    // Smallest nonzero gap between sorted scores bounds the jitter from above.
    std::vector<double> sorted = sc.scores;
    std::sort(sorted.begin(), sorted.end());
    double min_gap = 0.0;
    for (long i = 1; i < n; ++i) {
        double gap = sorted[i] - sorted[i - 1];
        if (gap > 0.0 && (min_gap == 0.0 || gap < min_gap)) min_gap = gap;
    }
    sc.delta_jit = min_gap > 0.0 ? min_gap / 2.0 : 0x1.0p-40;

    Rng rng(jitter_seed);
    std::vector<double> u(n);
    for (long i = 0; i < n; ++i) u[i] = rng.uniform01();

    // In exact arithmetic scores[i] + u[i]*delta orders lexicographically on
    // (score, u): the jitter is below half the smallest gap, so it can never
    // cross one, and inside a tie group u decides. Sorting the pairs gives
    // that order without the rounding of the sum ever collapsing it.
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0L);
    std::sort(order.begin(), order.end(), [&](long a, long b) {
        if (sc.scores[a] != sc.scores[b]) return sc.scores[a] < sc.scores[b];
        if (u[a] != u[b]) return u[a] < u[b];
        return a < b;
    });

    // The rounded sums are nondecreasing along `order` but can collide when
    // the jitter falls below one ulp of the score (many equal scores near a
    // large value); bump any collision up to the next representable double so
    // effective scores stay pairwise distinct in the exact order.
    sc.effective_scores.resize(n);
    double prev = -std::numeric_limits<double>::infinity();
    for (long pos = 0; pos < n; ++pos) {
        const long i = order[pos];
        double v = sc.scores[i] + u[i] * sc.delta_jit;
        if (!(v > prev)) v = std::nextafter(prev, std::numeric_limits<double>::infinity());
        sc.effective_scores[i] = v;
        prev = v;
    }

    sc.global_ranks.resize(n);
    for (long pos = 0; pos < n; ++pos) sc.global_ranks[order[pos]] = pos + 1;
    return sc;
}

ScoreSeries score_validation(const Series& series, const SplitPlan& plan,
                             const FittedClassifier& model, std::uint64_t jitter_seed) {
    std::vector<double> scores(plan.dv_len());
    for (long t = plan.dv_lo; t <= plan.dv_hi; ++t)
        scores[t - plan.dv_lo] = model.predict_proba(series.row(t), series.p());
    return jitter_scores(std::move(scores), jitter_seed);
}

double auc_at(const ScoreSeries& sc, long k, const SplitPlan& plan) {
    CandidateGrid grid = candidate_grid(plan);
    if (!grid.contains(k))
        throw Error(ErrorCode::out_of_grid,
                    "candidate k=" + std::to_string(k) + " outside [" + std::to_string(grid.lo) +
                        ", " + std::to_string(grid.hi) + "]");
    const long split = k - plan.dv_lo;  // last left-group position
    const long n = sc.size();
    long long count = 0;
    for (long i = 0; i <= split; ++i)
        for (long j = split + 1; j < n; ++j)
            if (sc.effective_scores[i] < sc.effective_scores[j]) ++count;
    const long long n0 = k - plan.m, n1 = plan.T - plan.m - k;
    return static_cast<double>(count) / (static_cast<double>(n0) * static_cast<double>(n1));
}

AucCurve auc_curve(const ScoreSeries& sc, const CandidateGrid& grid, const SplitPlan& plan) {
    if (grid.lo > grid.hi) throw Error(ErrorCode::empty_grid, "empty candidate grid");
    const long n = sc.size();
    AucCurve curve;
    curve.grid = grid;
    curve.psi.resize(grid.size());

    // Mann-Whitney via ranks: with distinct scores, the pair count for split k
    // equals (sum of right-group ranks) - n1(n1+1)/2. Advancing k by one moves
    // the score at time k+1 out of the right group — an O(1) update.
    long long right_rank_sum = 0;
    for (long pos = grid.lo - plan.dv_lo + 1; pos < n; ++pos)
        right_rank_sum += sc.global_ranks[pos];

    curve.q_hat = -1.0;
    for (long k = grid.lo; k <= grid.hi; ++k) {
        const long long n0 = k - plan.m, n1 = plan.T - plan.m - k;
        const long long count = right_rank_sum - n1 * (n1 + 1) / 2;
        double psi = static_cast<double>(count) / (static_cast<double>(n0) * static_cast<double>(n1));
        curve.psi[k - grid.lo] = psi;
        if (psi > curve.q_hat) {
            curve.q_hat = psi;
            curve.r_hat = k;
        }
        if (k < grid.hi) right_rank_sum -= sc.global_ranks[k + 1 - plan.dv_lo];
    }
    curve.scaled_stat = std::sqrt(static_cast<double>(plan.T)) * (curve.q_hat - 0.5);
    return curve;
}

SingleCpReport test_single(const Series& series, const RunConfig& cfg,
                           const NullQuantileTable& table, const ScanOptions& opts) {
    series.validate_finite();
    SplitPlan plan = make_split_plan(series.T(), cfg.epsilon, cfg.eta);
    CandidateGrid grid = candidate_grid(plan);

    if (table.kind != TableKind::sup_g0 ||
        std::abs(table.gamma - (cfg.epsilon + cfg.eta)) > 1e-12 ||
        std::abs(table.epsilon - cfg.epsilon) > 1e-12)
        throw Error(ErrorCode::quantile_table_mismatch,
                    "quantile table does not match (kind, gamma, epsilon)");
    if (!(cfg.alpha >= 0.0 && cfg.alpha < 1.0))
        throw Error(ErrorCode::invalid_argument, "alpha must lie in [0, 1)");

    TrainSet train = make_endpoint_train_set(series, plan);
    FittedClassifier model = train_classifier(cfg.classifier_kind, train,
                                              child_seed(cfg.seed, 1), opts.logistic,
                                              opts.forest, opts.threads);
    ScoreSeries sc = score_validation(series, plan, model, child_seed(cfg.seed, 2));
    AucCurve curve = auc_curve(sc, grid, plan);

    SingleCpReport report;
    report.alpha = cfg.alpha;
    report.critical_value = table.quantile_upper(cfg.alpha);
    report.scaled_stat = curve.scaled_stat;
    report.r_hat = curve.r_hat;
    report.reject = curve.scaled_stat >= report.critical_value;
    report.curve = std::move(curve);
    return report;
}

}  // namespace changeauc
