#include "changeauc/types.hpp"

#include <cmath>

namespace changeauc {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_trim: return "invalid-trim";
        case ErrorCode::empty_grid: return "empty-grid";
        case ErrorCode::degenerate_features: return "degenerate-features";
        case ErrorCode::dim_mismatch: return "dim-mismatch";
        case ErrorCode::out_of_grid: return "out-of-grid";
        case ErrorCode::quantile_table_mismatch: return "quantile-table-mismatch";
        case ErrorCode::invalid_decay: return "invalid-decay";
        case ErrorCode::segment_too_short: return "segment-too-short";
        case ErrorCode::invalid_cps: return "invalid-cps";
        case ErrorCode::invalid_spec: return "invalid-spec";
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::parse_error: return "parse-error";
        case ErrorCode::empty_file: return "empty-file";
        case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

Series::Series(long t_len, long p_dim) : t_(t_len), p_(p_dim) {
    if (t_len < 1 || p_dim < 1)
        throw Error(ErrorCode::invalid_argument, "Series dimensions must be positive");
    data_.assign(static_cast<std::size_t>(t_len) * p_dim, 0.0);
}

void Series::validate_finite() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            long t = static_cast<long>(i) / p_ + 1;
            long j = static_cast<long>(i) % p_ + 1;
            throw Error(ErrorCode::invalid_argument,
                        "non-finite value at t=" + std::to_string(t) + ", column " + std::to_string(j));
        }
    }
}

const char* classifier_kind_name(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::logistic_l1: return "logistic";
        case ClassifierKind::random_forest: return "rf";
        case ClassifierKind::constant_guess: return "constant";
    }
    return "unknown";
}

ClassifierKind classifier_kind_from_name(const std::string& name) {
    if (name == "logistic" || name == "logistic_l1") return ClassifierKind::logistic_l1;
    if (name == "rf" || name == "random_forest") return ClassifierKind::random_forest;
    if (name == "constant" || name == "constant_guess") return ClassifierKind::constant_guess;
    throw Error(ErrorCode::invalid_argument, "unknown classifier kind: " + name);
}

SplitPlan make_split_plan(long T, double epsilon, double eta) {
    if (T < kMinSeriesLength)
        throw Error(ErrorCode::invalid_trim,
                    "series length " + std::to_string(T) + " below minimum " +
                        std::to_string(kMinSeriesLength));
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw Error(ErrorCode::invalid_trim, "epsilon must lie in (0, 1/2)");
    if (!(eta > 0.0 && eta < 0.5 - epsilon))
        throw Error(ErrorCode::invalid_trim, "eta must lie in (0, 1/2 - epsilon)");

    SplitPlan plan;
    plan.T = T;
    plan.epsilon = epsilon;
    plan.eta = eta;
    plan.gamma = epsilon + eta;
    plan.m = static_cast<long>(std::floor(T * epsilon));
    if (static_cast<long>(std::floor(T * plan.gamma)) <= plan.m)
        throw Error(ErrorCode::invalid_trim,
                    "trims too tight: floor(T*gamma) must exceed floor(T*epsilon)");
    plan.d0_lo = 1;
    plan.d0_hi = plan.m;
    plan.dv_lo = plan.m + 1;
    plan.dv_hi = T - plan.m;
    plan.d1_lo = T - plan.m + 1;
    plan.d1_hi = T;
    return plan;
}

CandidateGrid candidate_grid(const SplitPlan& plan) {
    CandidateGrid grid;
    grid.lo = static_cast<long>(std::floor(plan.T * plan.gamma));
    grid.hi = static_cast<long>(std::floor(plan.T * (1.0 - plan.gamma)));
    if (grid.lo > grid.hi)
        throw Error(ErrorCode::empty_grid, "candidate grid is empty");
    return grid;
}

}  // namespace changeauc
