#include "changeauc/simbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "changeauc/parallel.hpp"
#include "changeauc/rng.hpp"

namespace changeauc {

namespace {

struct DgpName {
    DgpKind kind;
    const char* name;
};

constexpr DgpName kDgpNames[] = {
    {DgpKind::standard_null, "standard_null"},
    {DgpKind::banded_null, "banded_null"},
    {DgpKind::exponential_null, "exponential_null"},
    {DgpKind::dense_mean, "dense_mean"},
    {DgpKind::sparse_mean, "sparse_mean"},
    {DgpKind::dense_cov, "dense_cov"},
    {DgpKind::banded_cov, "banded_cov"},
    {DgpKind::dense_diag_cov, "dense_diag_cov"},
    {DgpKind::sparse_diag_cov, "sparse_diag_cov"},
    {DgpKind::dense_dist, "dense_dist"},
    {DgpKind::sparse_dist, "sparse_dist"},
};

// Number of affected coordinates: dense variants touch floor(p/5), sparse
// variants floor(p/100).
long affected_coords(DgpKind kind, long p) {
    switch (kind) {
        case DgpKind::dense_mean:
        case DgpKind::dense_diag_cov:
        case DgpKind::dense_dist:
            return p / 5;
        case DgpKind::sparse_mean:
        case DgpKind::sparse_diag_cov:
        case DgpKind::sparse_dist:
            return p / 100;
        default:
            return 0;
    }
}

// Lower Cholesky factor of an AR(1)-style covariance rho^|i-j|.
Eigen::MatrixXd banded_cholesky(long p, double rho) {
    Eigen::MatrixXd sigma(p, p);
    for (long i = 0; i < p; ++i)
        for (long j = 0; j < p; ++j) sigma(i, j) = std::pow(rho, std::abs(i - j));
    return sigma.llt().matrixL();
}

// Lower Cholesky factor of the equicorrelation covariance 1 on the diagonal,
// rho off it.
Eigen::MatrixXd equicorr_cholesky(long p, double rho) {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(p, p, rho);
    sigma.diagonal().setOnes();
    return sigma.llt().matrixL();
}

void fill_correlated_row(double* row, long p, const Eigen::MatrixXd& chol, Rng& rng,
                         std::vector<double>& scratch) {
    scratch.resize(p);
    for (long j = 0; j < p; ++j) scratch[j] = rng.normal();
    for (long i = 0; i < p; ++i) {
        double acc = 0.0;
        for (long j = 0; j <= i; ++j) acc += chol(i, j) * scratch[j];
        row[i] = acc;
    }
}

}  // namespace

const char* dgp_kind_name(DgpKind kind) {
    for (const auto& entry : kDgpNames)
        if (entry.kind == kind) return entry.name;
    return "unknown";
}

DgpKind dgp_kind_from_name(const std::string& name) {
    for (const auto& entry : kDgpNames)
        if (name == entry.name) return entry.kind;
    throw Error(ErrorCode::invalid_argument, "unknown DGP: " + name);
}

bool dgp_is_null(DgpKind kind) {
    return kind == DgpKind::standard_null || kind == DgpKind::banded_null ||
           kind == DgpKind::exponential_null;
}

long DgpSpec::resolved_t0() const { return t0 ? *t0 : T / 2; }

void DgpSpec::validate() const {
    if (T < 2 || p < 1) throw Error(ErrorCode::invalid_spec, "need T >= 2 and p >= 1");
    if (dgp_is_null(kind)) {
        if (t0) throw Error(ErrorCode::invalid_spec, "null DGPs take no change index");
        return;
    }
    long cp = resolved_t0();
    if (cp < 1 || cp >= T)
        throw Error(ErrorCode::invalid_spec, "change index must lie in [1, T-1]");
    long q = affected_coords(kind, p);
    bool needs_coords = kind != DgpKind::dense_cov && kind != DgpKind::banded_cov;
    if (needs_coords && q < 1)
        throw Error(ErrorCode::invalid_spec,
                    std::string("p too small for ") + dgp_kind_name(kind) +
                        " (needs at least one affected coordinate)");
}

Series generate(const DgpSpec& spec, std::uint64_t seed) {
    spec.validate();
    const long T = spec.T, p = spec.p;
    Series out(T, p);
    Rng rng(seed);
    std::vector<double> scratch;

    auto fill_iid_normal = [&](long t_lo, long t_hi) {
        for (long t = t_lo; t <= t_hi; ++t) {
            double* row = out.row(t);
            for (long j = 0; j < p; ++j) row[j] = rng.normal();
        }
    };

    const long cp = dgp_is_null(spec.kind) ? T : spec.resolved_t0();
    const long q = affected_coords(spec.kind, p);

    switch (spec.kind) {
        case DgpKind::standard_null:
            fill_iid_normal(1, T);
            break;
        case DgpKind::banded_null: {
            Eigen::MatrixXd chol = banded_cholesky(p, 0.8);
            for (long t = 1; t <= T; ++t) fill_correlated_row(out.row(t), p, chol, rng, scratch);
            break;
        }
        case DgpKind::exponential_null:
            for (long t = 1; t <= T; ++t) {
                double* row = out.row(t);
                for (long j = 0; j < p; ++j) row[j] = rng.exponential1();
            }
            break;
        case DgpKind::dense_mean:
        case DgpKind::sparse_mean: {
            fill_iid_normal(1, T);
            const double shift = 2.0 / std::sqrt(static_cast<double>(q));
            for (long t = cp + 1; t <= T; ++t) {
                double* row = out.row(t);
                for (long j = 0; j < q; ++j) row[j] += shift;
            }
            break;
        }
        case DgpKind::dense_cov: {
            fill_iid_normal(1, cp);
            Eigen::MatrixXd chol = equicorr_cholesky(p, 0.1);
            for (long t = cp + 1; t <= T; ++t)
                fill_correlated_row(out.row(t), p, chol, rng, scratch);
            break;
        }
        case DgpKind::banded_cov: {
            fill_iid_normal(1, cp);
            Eigen::MatrixXd chol = banded_cholesky(p, 0.8);
            for (long t = cp + 1; t <= T; ++t)
                fill_correlated_row(out.row(t), p, chol, rng, scratch);
            break;
        }
        case DgpKind::dense_diag_cov:
        case DgpKind::sparse_diag_cov: {
            fill_iid_normal(1, T);
            const double scale = std::sqrt(1.0 + 5.0 / std::sqrt(static_cast<double>(q)));
            for (long t = cp + 1; t <= T; ++t) {
                double* row = out.row(t);
                for (long j = 0; j < q; ++j) row[j] *= scale;
            }
            break;
        }
        case DgpKind::dense_dist:
        case DgpKind::sparse_dist: {
            fill_iid_normal(1, cp);
            for (long t = cp + 1; t <= T; ++t) {
                double* row = out.row(t);
                for (long j = 0; j < q; ++j) row[j] = rng.exponential1() - 1.0;
                for (long j = q; j < p; ++j) row[j] = rng.normal();
            }
            break;
        }
    }
    return out;
}

namespace {

double comb2(double n) { return n * (n - 1.0) / 2.0; }

std::vector<long> segment_lengths(const std::vector<long>& cps, long T) {
    std::vector<long> lengths;
    long prev = 0;
    for (long cp : cps) {
        lengths.push_back(cp - prev);
        prev = cp;
    }
    lengths.push_back(T - prev);
    return lengths;
}

void validate_cps(const std::vector<long>& cps, long T) {
    long prev = 0;
    for (long cp : cps) {
        if (cp <= prev || cp >= T)
            throw Error(ErrorCode::invalid_cps,
                        "change-points must be strictly increasing inside (0, T)");
        prev = cp;
    }
}

}  // namespace

double adjusted_rand_index(const std::vector<long>& true_cps, const std::vector<long>& est_cps,
                           long T) {
    if (T < 1) throw Error(ErrorCode::invalid_cps, "T must be positive");
    validate_cps(true_cps, T);
    validate_cps(est_cps, T);
    if (est_cps.empty()) return 0.0;  // "no detection" convention

    // Segments are consecutive index blocks, so the contingency table of the
    // two partitions is the overlap pattern of two interval systems.
    std::vector<long> a = segment_lengths(true_cps, T);
    std::vector<long> b = segment_lengths(est_cps, T);
    double sum_cells = 0.0;
    std::size_t i = 0, j = 0;
    long rem_a = a[0], rem_b = b[0];
    while (true) {
        long overlap = std::min(rem_a, rem_b);
        sum_cells += comb2(static_cast<double>(overlap));
        rem_a -= overlap;
        rem_b -= overlap;
        if (rem_a == 0) {
            if (++i == a.size()) break;
            rem_a = a[i];
        }
        if (rem_b == 0 && j + 1 < b.size()) rem_b = b[++j];
    }

    double sum_a = 0.0, sum_b = 0.0;
    for (long len : a) sum_a += comb2(static_cast<double>(len));
    for (long len : b) sum_b += comb2(static_cast<double>(len));
    double total = comb2(static_cast<double>(T));
    double expected = sum_a * sum_b / total;
    double max_index = (sum_a + sum_b) / 2.0;
    if (max_index == expected) return 1.0;  // both partitions trivial
    return (sum_cells - expected) / (max_index - expected);
}

namespace {

ExperimentResult run_experiment(const DgpSpec& spec, const RunConfig& cfg, long reps,
                                const NullQuantileTable& table, const ScanOptions& opts,
                                int threads, bool power) {
    spec.validate();
    if (reps < 1) throw Error(ErrorCode::invalid_argument, "need reps >= 1");

    ExperimentResult result;
    result.rep_count = reps;
    std::vector<int> rejected(reps, 0);
    std::vector<double> ari(reps, 0.0), loc(reps, 0.0), secs(reps, 0.0);

    parallel_for(reps, threads, [&](long rep) {
        auto start = std::chrono::steady_clock::now();
        std::uint64_t rep_seed = child_seed(cfg.seed, static_cast<std::uint64_t>(rep));
        Series series = generate(spec, child_seed(rep_seed, 10));
        RunConfig rep_cfg = cfg;
        rep_cfg.seed = child_seed(rep_seed, 11);
        ScanOptions rep_opts = opts;
        rep_opts.threads = 1;  // replications already run in parallel
        SingleCpReport report = test_single(series, rep_cfg, table, rep_opts);
        rejected[rep] = report.reject ? 1 : 0;
        if (power) {
            long t0 = spec.resolved_t0();
            // Paper convention: ARI fixed at 0 when nothing is detected.
            ari[rep] = report.reject
                           ? adjusted_rand_index({t0}, {report.r_hat}, spec.T)
                           : 0.0;
            loc[rep] = std::abs(static_cast<double>(report.r_hat - t0));
        }
        secs[rep] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    long count = 0;
    for (int r : rejected) count += r;
    result.rejection_rate = static_cast<double>(count) / static_cast<double>(reps);
    result.rejected = std::move(rejected);
    if (power) {
        result.ari_samples = std::move(ari);
        result.localization_errors = std::move(loc);
    }
    result.runtimes = std::move(secs);
    return result;
}

}  // namespace

ExperimentResult run_size_experiment(const DgpSpec& spec, const RunConfig& cfg, long reps,
                                     const NullQuantileTable& table, const ScanOptions& opts,
                                     int threads) {
    if (!dgp_is_null(spec.kind))
        throw Error(ErrorCode::invalid_spec, "size experiment requires a null DGP");
    return run_experiment(spec, cfg, reps, table, opts, threads, false);
}

ExperimentResult run_power_experiment(const DgpSpec& spec, const RunConfig& cfg, long reps,
                                      const NullQuantileTable& table, const ScanOptions& opts,
                                      int threads) {
    if (dgp_is_null(spec.kind))
        throw Error(ErrorCode::invalid_spec, "power experiment requires a change DGP");
    return run_experiment(spec, cfg, reps, table, opts, threads, true);
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace changeauc
