#pragma once

#include <vector>

#include "changeauc/auc_scan.hpp"
#include "changeauc/null_dist.hpp"
#include "changeauc/types.hpp"

namespace changeauc {

// CUSUM process over classifier scores W_t on the validation window, with the
// pooled split variance estimate V-hat minimized over all interior splits.
struct CusumCurve {
    CandidateGrid grid;
    std::vector<double> phi;         // phi[k - grid.lo]
    std::vector<double> mean_left;   // prefix mean at each grid k
    std::vector<double> mean_right;  // suffix mean at each grid k
    double v_hat = 0.0;              // min over interior k of V-hat(k), floored
    double max_abs = 0.0;            // sup_k |phi(k)|
    long argmax_k = 0;               // smallest maximizer of |phi|
    bool degenerate_variance = false;

    double at(long k) const { return phi[k - grid.lo]; }
};

inline constexpr double kVarianceFloor = 1e-12;

// scores[i] corresponds to time plan.dv_lo + i; raw scores, no jitter (the
// statistic is mean-based, so ties are harmless).
CusumCurve cusum_curve(const std::vector<double>& scores, const SplitPlan& plan);

// Same endpoint-training pipeline as the AUC test, but the validation scores
// feed the CUSUM statistic, compared against sup H0 quantiles. Two-sided
// statistic |phi| per the baseline's definition.
SingleCpReport cusum_test(const Series& series, const RunConfig& cfg,
                          const NullQuantileTable& table, const ScanOptions& opts = {});

}  // namespace changeauc
