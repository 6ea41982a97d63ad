#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "changeauc/auc_scan.hpp"
#include "changeauc/null_dist.hpp"
#include "changeauc/types.hpp"

namespace changeauc {

enum class DgpKind {
    standard_null,
    banded_null,
    exponential_null,
    dense_mean,
    sparse_mean,
    dense_cov,
    banded_cov,
    dense_diag_cov,
    sparse_diag_cov,
    dense_dist,
    sparse_dist,
};

const char* dgp_kind_name(DgpKind kind);
DgpKind dgp_kind_from_name(const std::string& name);
bool dgp_is_null(DgpKind kind);

// A simulation design. Change kinds switch distribution after time t0
// (default floor(T/2)); the post-change parameters follow the standard
// formulas, e.g. dense mean shift 2/sqrt(floor(p/5)) on the first floor(p/5)
// coordinates.
struct DgpSpec {
    DgpKind kind = DgpKind::standard_null;
    long T = 0;
    long p = 0;
    std::optional<long> t0;

    long resolved_t0() const;  // change kinds only
    void validate() const;
};

Series generate(const DgpSpec& spec, std::uint64_t seed);

// ARI between the segment partitions of {1..T} induced by two sorted
// change-point lists (a change-point is the last index of its left segment).
// An empty estimate returns 0 by convention, even against an empty truth.
double adjusted_rand_index(const std::vector<long>& true_cps, const std::vector<long>& est_cps,
                           long T);

struct ExperimentResult {
    long rep_count = 0;
    double rejection_rate = 0.0;
    std::vector<int> rejected;                // per-rep 0/1 flags
    std::vector<double> ari_samples;          // power runs only
    std::vector<double> localization_errors;  // |R_hat - t0|, power runs only
    std::vector<double> runtimes;             // per-rep seconds (not deterministic)
};

ExperimentResult run_size_experiment(const DgpSpec& spec, const RunConfig& cfg, long reps,
                                     const NullQuantileTable& table, const ScanOptions& opts = {},
                                     int threads = 1);
ExperimentResult run_power_experiment(const DgpSpec& spec, const RunConfig& cfg, long reps,
                                      const NullQuantileTable& table, const ScanOptions& opts = {},
                                      int threads = 1);

double median(std::vector<double> values);  // NaN on empty input

}  // namespace changeauc
