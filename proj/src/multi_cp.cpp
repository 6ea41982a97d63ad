#include "changeauc/multi_cp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "changeauc/parallel.hpp"
#include "changeauc/rng.hpp"

namespace changeauc {

namespace {

constexpr std::uint64_t kStreamScan = 0x5C;
constexpr std::uint64_t kStreamPermute = 0x9E;

Series copy_rows(const Series& source, long lo, long hi) {
    Series out(hi - lo + 1, source.p());
    std::copy(source.row(lo), source.row(hi) + source.p(), out.raw().begin());
    return out;
}

// Max AUC and its argmax for one segment, with derived train/jitter seeds.
struct ScanValue {
    double q_hat = 0.0;
    long r_hat = 0;  // local 1-based index within the segment
};

ScanValue scan_segment(const Series& segment, ClassifierKind kind, std::uint64_t seed,
                       const RunConfig& cfg, const ScanOptions& opts) {
    SplitPlan plan = make_split_plan(segment.T(), cfg.epsilon, cfg.eta);
    CandidateGrid grid = candidate_grid(plan);
    TrainSet train = make_endpoint_train_set(segment, plan);
    FittedClassifier model =
        train_classifier(kind, train, child_seed(seed, 1), opts.logistic, opts.forest, 1);
    ScoreSeries sc = score_validation(segment, plan, model, child_seed(seed, 2));
    AucCurve curve = auc_curve(sc, grid, plan);
    return {curve.q_hat, curve.r_hat};
}

long order_statistic_index(double quantile, long B) {
    long idx = static_cast<long>(std::ceil(quantile * static_cast<double>(B)));
    return std::clamp<long>(idx, 1, B);
}

}  // namespace

SeededIntervalPlan seeded_intervals(long T, double decay, long min_len) {
    if (!(decay >= 0.5 && decay < 1.0))
        throw Error(ErrorCode::invalid_decay, "decay must lie in [1/2, 1)");
    if (min_len < 1 || T < min_len)
        throw Error(ErrorCode::invalid_argument, "need T >= min_len >= 1");

    SeededIntervalPlan plan;
    plan.decay = decay;
    plan.min_len = min_len;

    const long max_layers =
        static_cast<long>(std::ceil(std::log(static_cast<double>(T)) / std::log(1.0 / decay)));
    std::set<std::pair<long, long>> seen;
    for (long layer = 1; layer <= std::max<long>(1, max_layers); ++layer) {
        const double length = static_cast<double>(T) * std::pow(decay, layer - 1);
        if (layer > 1 && length < static_cast<double>(min_len)) break;
        // Interval count from the seeded-segmentation construction.
        const long count =
            2 * static_cast<long>(std::ceil(std::pow(1.0 / decay, layer - 1))) - 1;
        const double shift =
            count > 1 ? (static_cast<double>(T) - length) / static_cast<double>(count - 1) : 0.0;
        for (long i = 0; i < count; ++i) {
            const double start = static_cast<double>(i) * shift;
            long lo = static_cast<long>(std::floor(start)) + 1;
            long hi = static_cast<long>(std::floor(start + length));
            if (hi > T) hi = T;
            if (layer > 1 && hi - lo + 1 < min_len) continue;
            if (seen.insert({lo, hi}).second)
                plan.intervals.push_back({lo, hi, static_cast<int>(layer)});
        }
    }
    return plan;
}

double permutation_threshold(const Series& segment, const RunConfig& cfg,
                             const PermutationConfig& pcfg, const ScanOptions& opts) {
    if (pcfg.B < 19) throw Error(ErrorCode::invalid_argument, "need B >= 19");
    if (!(pcfg.threshold_quantile > 0.0 && pcfg.threshold_quantile < 1.0))
        throw Error(ErrorCode::invalid_argument, "threshold_quantile must lie in (0,1)");
    try {
        make_split_plan(segment.T(), cfg.epsilon, cfg.eta);
    } catch (const Error& e) {
        throw Error(ErrorCode::segment_too_short,
                    std::string("segment does not admit a split: ") + e.what());
    }

    std::vector<double> stats(pcfg.B);
    parallel_for(pcfg.B, opts.threads, [&](long b) {
        Rng rng(child_seed(child_seed(pcfg.seed, kStreamPermute), static_cast<std::uint64_t>(b)));
        std::vector<long> order(segment.T());
        std::iota(order.begin(), order.end(), 1L);
        rng.shuffle(order);
        Series permuted(segment.T(), segment.p());
        for (long t = 1; t <= segment.T(); ++t)
            std::copy(segment.row(order[t - 1]), segment.row(order[t - 1]) + segment.p(),
                      permuted.row(t));
        stats[b] = scan_segment(permuted, cfg.classifier_kind,
                                child_seed(child_seed(pcfg.seed, kStreamScan),
                                           static_cast<std::uint64_t>(b)),
                                cfg, opts)
                       .q_hat;
    });
    std::sort(stats.begin(), stats.end());
    return stats[order_statistic_index(pcfg.threshold_quantile, pcfg.B) - 1];
}

namespace {

struct SbsContext {
    const Series& series;
    const RunConfig& cfg;
    const PermutationConfig& pcfg;
    const ScanOptions& opts;
    long min_len;
    double decay;
    MultiCpReport report;

    // Sweep all admissible seeded intervals of rows[lo..hi] (an already
    // materialized segment or a permuted copy) and return the best (Q, R).
    // Interval scan seeds derive from `seed_root` and the interval index so
    // the observed sweep and each permuted sweep are exchangeable replicas.
    struct SweepValue {
        double best_q = -1.0;
        long best_r = 0;  // index local to the segment
        long best_lo = 0, best_hi = 0;
        long scanned = 0, skipped = 0;
    };

    SweepValue sweep(const Series& segment, const SeededIntervalPlan& plan,
                     std::uint64_t seed_root) const {
        SweepValue value;
        for (std::size_t i = 0; i < plan.intervals.size(); ++i) {
            const SeededInterval& interval = plan.intervals[i];
            Series sub = copy_rows(segment, interval.lo, interval.hi);
            ScanValue scan;
            try {
                scan = scan_segment(sub, cfg.classifier_kind, child_seed(seed_root, i), cfg,
                                    opts);
            } catch (const Error&) {
                ++value.skipped;  // interval too short for a valid split
                continue;
            }
            ++value.scanned;
            if (scan.q_hat > value.best_q) {
                value.best_q = scan.q_hat;
                value.best_r = interval.lo - 1 + scan.r_hat;
                value.best_lo = interval.lo;
                value.best_hi = interval.hi;
            }
        }
        return value;
    }

    void process(long lo, long hi, long depth) {
        report.max_depth = std::max(report.max_depth, depth);
        SegmentDecision decision;
        decision.lo = lo;
        decision.hi = hi;
        decision.depth = depth;

        if (hi - lo < min_len) {
            decision.status = "too-short";
            report.audit.push_back(decision);
            return;
        }

        const long seg_len = hi - lo + 1;
        const Series segment = copy_rows(series, lo, hi);
        const SeededIntervalPlan plan = seeded_intervals(seg_len, decay, min_len);

        const std::uint64_t node_key =
            child_seed(child_seed(cfg.seed, static_cast<std::uint64_t>(lo)),
                       static_cast<std::uint64_t>(hi));
        SweepValue observed = sweep(segment, plan, child_seed(node_key, kStreamScan));
        decision.intervals_scanned = observed.scanned;
        decision.intervals_skipped = observed.skipped;

        if (observed.scanned == 0) {
            decision.status = "no-detection";
            report.audit.push_back(decision);
            return;
        }

        // Permutation calibration of the identical interval sweep.
        const std::uint64_t perm_key =
            child_seed(child_seed(pcfg.seed, static_cast<std::uint64_t>(lo)),
                       static_cast<std::uint64_t>(hi));
        std::vector<double> stats(pcfg.B);
        parallel_for(pcfg.B, opts.threads, [&](long b) {
            Rng rng(child_seed(child_seed(perm_key, kStreamPermute),
                               static_cast<std::uint64_t>(b)));
            std::vector<long> order(seg_len);
            std::iota(order.begin(), order.end(), 1L);
            rng.shuffle(order);
            Series permuted(seg_len, segment.p());
            for (long t = 1; t <= seg_len; ++t)
                std::copy(segment.row(order[t - 1]), segment.row(order[t - 1]) + segment.p(),
                          permuted.row(t));
            stats[b] =
                sweep(permuted, plan,
                      child_seed(child_seed(perm_key, kStreamScan), static_cast<std::uint64_t>(b)))
                    .best_q;
        });
        std::sort(stats.begin(), stats.end());
        decision.delta = stats[order_statistic_index(pcfg.threshold_quantile, pcfg.B) - 1];
        decision.best_q = observed.best_q;
        decision.best_interval_lo = lo - 1 + observed.best_lo;
        decision.best_interval_hi = lo - 1 + observed.best_hi;

        // Strict dominance: "obs > Delta" with Delta the ceil(q*B)-th smallest
        // replicate equals the usual permutation rule
        // (1 + #{b : S_b >= S_obs}) / (B+1) <= 1-q, which stays valid under
        // ties (sweep maxima often sit exactly at the discrete AUC ceiling 1,
        // where a ">=" rule fires far too often).
        if (observed.best_q > decision.delta) {
            const long cp = lo - 1 + observed.best_r;  // absolute index
            decision.status = "detected";
            decision.r_hat = cp;
            report.tau_hat.push_back(cp);
            report.audit.push_back(decision);
            process(lo, cp, depth + 1);
            process(cp + 1, hi, depth + 1);
        } else {
            decision.status = "no-detection";
            report.audit.push_back(decision);
        }
    }
};

}  // namespace

MultiCpReport detect_multiple(const Series& series, const RunConfig& cfg,
                              const PermutationConfig& pcfg, long min_len, double decay,
                              const ScanOptions& opts) {
    series.validate_finite();
    if (pcfg.B < 19) throw Error(ErrorCode::invalid_argument, "need B >= 19");
    if (!(pcfg.threshold_quantile > 0.0 && pcfg.threshold_quantile < 1.0))
        throw Error(ErrorCode::invalid_argument, "threshold_quantile must lie in (0,1)");
    if (min_len < 1 || series.T() < min_len)
        throw Error(ErrorCode::segment_too_short, "series shorter than min_len");

    SbsContext ctx{series, cfg, pcfg, opts, min_len, decay, {}};
    ctx.process(1, series.T(), 0);
    std::sort(ctx.report.tau_hat.begin(), ctx.report.tau_hat.end());
    return std::move(ctx.report);
}

}  // namespace changeauc
