#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "changeauc/auc_scan.hpp"
#include "changeauc/types.hpp"

namespace changeauc {

inline const double kDefaultDecay = 0.7071067811865476;  // 1/sqrt(2)
inline constexpr long kDefaultMinLen = 40;

struct SeededInterval {
    long lo = 0;
    long hi = 0;
    int layer = 0;

    long length() const { return hi - lo + 1; }
};

// Deterministic multi-scale interval collection: layer k holds T_k intervals
// of length T*decay^(k-1), evenly shifted; layer 1 is the full interval.
struct SeededIntervalPlan {
    double decay = kDefaultDecay;
    long min_len = kDefaultMinLen;
    std::vector<SeededInterval> intervals;
};

struct PermutationConfig {
    long B = 199;
    double threshold_quantile = 0.90;
    std::uint64_t seed = 0;
};

// One recursion node of the segmentation, kept for the audit trail.
struct SegmentDecision {
    long lo = 0;
    long hi = 0;
    long depth = 0;
    std::string status;  // "detected" | "no-detection" | "too-short"
    long intervals_scanned = 0;
    long intervals_skipped = 0;
    double best_q = 0.0;
    long best_interval_lo = 0;
    long best_interval_hi = 0;
    double delta = 0.0;
    long r_hat = 0;  // absolute index; 0 when nothing fired
};

struct MultiCpReport {
    std::vector<long> tau_hat;  // sorted change-point estimates
    std::vector<SegmentDecision> audit;
    long max_depth = 0;
};

SeededIntervalPlan seeded_intervals(long T, double decay, long min_len);

// Literal permutation threshold for a single segment: B full-segment scans on
// time-shuffled copies, Delta = ceil(q*B)-th smallest of the B max-AUC values.
double permutation_threshold(const Series& segment, const RunConfig& cfg,
                             const PermutationConfig& pcfg, const ScanOptions& opts = {});

// Seeded binary segmentation. On each segment every admissible seeded interval
// is scanned for its max AUC; the node's threshold Delta is calibrated by
// applying the identical interval sweep to B time-shuffled copies of the
// segment (so the observed statistic and its permutation replicates are
// exchangeable under no change). A change is declared only when the observed
// sweep value strictly exceeds Delta — ties count against detection, keeping
// the per-node false-detection rate at most 1 - threshold_quantile. Recurses
// around the detected point.
MultiCpReport detect_multiple(const Series& series, const RunConfig& cfg,
                              const PermutationConfig& pcfg, long min_len = kDefaultMinLen,
                              double decay = kDefaultDecay, const ScanOptions& opts = {});

}  // namespace changeauc
