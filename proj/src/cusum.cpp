#include "changeauc/cusum.hpp"

#include <cmath>

#include "changeauc/rng.hpp"

namespace changeauc {

CusumCurve cusum_curve(const std::vector<double>& scores, const SplitPlan& plan) {
    const long n = plan.dv_len();
    if (static_cast<long>(scores.size()) != n)
        throw Error(ErrorCode::invalid_argument, "score length does not match dv window");
    CandidateGrid grid = candidate_grid(plan);

    // Prefix sums over the window; all split quantities follow from them.
    std::vector<double> sum1(n + 1, 0.0), sum2(n + 1, 0.0);
    for (long i = 0; i < n; ++i) {
        sum1[i + 1] = sum1[i] + scores[i];
        sum2[i + 1] = sum2[i] + scores[i] * scores[i];
    }
    const double total = sum1[n];

    // V-hat(k) pools the centered sums of squares of both sides; the estimate
    // is its minimum over every interior split (both segments nonempty).
    double v_min = std::numeric_limits<double>::infinity();
    for (long cut = 1; cut <= n - 1; ++cut) {
        double left_n = static_cast<double>(cut), right_n = static_cast<double>(n - cut);
        double css_left = sum2[cut] - sum1[cut] * sum1[cut] / left_n;
        double css_right = (sum2[n] - sum2[cut]) -
                           (total - sum1[cut]) * (total - sum1[cut]) / right_n;
        v_min = std::min(v_min, (css_left + css_right) / static_cast<double>(n));
    }

    CusumCurve curve;
    curve.grid = grid;
    curve.degenerate_variance = !(v_min >= kVarianceFloor);
    curve.v_hat = curve.degenerate_variance ? kVarianceFloor : v_min;

    const double inv_sd = 1.0 / std::sqrt(curve.v_hat);
    curve.phi.resize(grid.size());
    curve.mean_left.resize(grid.size());
    curve.mean_right.resize(grid.size());
    curve.max_abs = -1.0;
    for (long k = grid.lo; k <= grid.hi; ++k) {
        const long cut = k - plan.m;  // left segment size within the window
        const double left_n = static_cast<double>(cut);
        const double right_n = static_cast<double>(n - cut);
        const double bracket = sum1[cut] - left_n / static_cast<double>(n) * total;
        const double weight = std::sqrt(static_cast<double>(n) / (left_n * right_n));
        const double phi = inv_sd * weight * bracket;
        curve.phi[k - grid.lo] = phi;
        curve.mean_left[k - grid.lo] = sum1[cut] / left_n;
        curve.mean_right[k - grid.lo] = (total - sum1[cut]) / right_n;
        if (std::abs(phi) > curve.max_abs) {
            curve.max_abs = std::abs(phi);
            curve.argmax_k = k;
        }
    }
    return curve;
}

SingleCpReport cusum_test(const Series& series, const RunConfig& cfg,
                          const NullQuantileTable& table, const ScanOptions& opts) {
    series.validate_finite();
    SplitPlan plan = make_split_plan(series.T(), cfg.epsilon, cfg.eta);

    if (table.kind != TableKind::sup_h0 ||
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
    std::vector<double> scores(plan.dv_len());
    for (long t = plan.dv_lo; t <= plan.dv_hi; ++t)
        scores[t - plan.dv_lo] = model.predict_proba(series.row(t), series.p());

    CusumCurve curve = cusum_curve(scores, plan);

    SingleCpReport report;
    report.alpha = cfg.alpha;
    report.critical_value = table.quantile_upper(cfg.alpha);
    report.scaled_stat = curve.max_abs;
    report.r_hat = curve.argmax_k;
    report.reject = curve.max_abs >= report.critical_value;
    report.curve.grid = curve.grid;
    report.cusum_phi = std::move(curve.phi);
    return report;
}

}  // namespace changeauc
