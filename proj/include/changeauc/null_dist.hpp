#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "changeauc/rng.hpp"
#include "changeauc/types.hpp"

namespace changeauc {

// Standard Brownian motion sampled at knots i/K, i = 0..K.
struct BrownianPath {
    long knots = 0;
    std::vector<double> b;  // b[i] = B(i/K), b[0] = 0
};

enum class TableKind { sup_g0, sup_h0 };

const char* table_kind_name(TableKind kind);
TableKind table_kind_from_name(const std::string& name);

// Monte Carlo quantile table of a sup-functional of Brownian motion over
// r in [gamma, 1-gamma]. Reproducible from (kind, gamma, epsilon, K, R, seed).
struct NullQuantileTable {
    TableKind kind = TableKind::sup_g0;
    double gamma = 0.0;
    double epsilon = 0.0;
    long knots = 0;
    long reps = 0;
    std::uint64_t seed = 0;
    // (alpha, Q(1-alpha)) at the standard alphas 0.20/0.10/0.05/0.01/0.005.
    std::vector<std::pair<double, double>> quantiles;
    // Percentile grid at probabilities i/1000, i = 0..1000 (type-7 values),
    // for interpolating Q(1-alpha) at non-tabulated alphas.
    std::vector<double> raw_percentiles;

    // Q(1-alpha); +infinity for alpha == 0.
    double quantile_upper(double alpha) const;
};

BrownianPath simulate_brownian_path(long knots, Rng& rng);

// G0(r) = (1/sqrt(12)) [ (B(1-e)-B(r))/(1-e-r) - (B(r)-B(e))/(r-e) ]
// evaluated at knot index i (r = i/K).
double g0_value(const BrownianPath& path, double epsilon, long knot_index);

// H0(r) = sqrt((1-2e)/((r-e)(1-r-e))) [ (B(r)-B(e)) - ((r-e)/(1-2e)) (B(1-e)-B(e)) ],
// the standardized Brownian bridge over [e, 1-e]. The sign between the bracket
// terms follows the tabulated quantiles (a "+" would not be a bridge and its
// sup has a far heavier distribution).
double h0_value(const BrownianPath& path, double epsilon, long knot_index);

// sup over knots with r in [gamma, 1-gamma] of the respective functional
// (one-sided maxima, matching the tabulated distributions).
double sup_g0_sample(const BrownianPath& path, double epsilon, double gamma);
double sup_h0_sample(const BrownianPath& path, double epsilon, double gamma);

NullQuantileTable build_table(TableKind kind, double epsilon, double eta, long knots, long reps,
                              std::uint64_t seed, int threads = 1);

// Disk cache keyed by every table parameter; corrupt or mismatched cache files
// are rebuilt. Empty cache_dir disables caching.
std::string table_cache_filename(TableKind kind, double epsilon, double eta, long knots,
                                 long reps, std::uint64_t seed);
void save_table(const NullQuantileTable& table, const std::string& path);
NullQuantileTable load_table(const std::string& path);
NullQuantileTable load_or_build_table(TableKind kind, double epsilon, double eta, long knots,
                                      long reps, std::uint64_t seed,
                                      const std::string& cache_dir, int threads = 1);

}  // namespace changeauc
