#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace changeauc {

enum class ErrorCode {
    invalid_trim,
    empty_grid,
    degenerate_features,
    dim_mismatch,
    out_of_grid,
    quantile_table_mismatch,
    invalid_decay,
    segment_too_short,
    invalid_cps,
    invalid_spec,
    invalid_argument,
    parse_error,
    empty_file,
    io_error,
};

const char* error_code_name(ErrorCode code);

// Domain error carrying a stable machine-readable code next to the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Time-ordered sequence of p-dimensional observations, row t = Z_t.
// Indices in the public model are 1-based throughout, matching the usual
// change-point notation; storage is a dense row-major buffer.
class Series {
public:
    Series() = default;
    Series(long t_len, long p_dim);

    long T() const { return t_; }
    long p() const { return p_; }

    double* row(long t) { return data_.data() + (t - 1) * p_; }              // t in [1, T]
    const double* row(long t) const { return data_.data() + (t - 1) * p_; }

    double& at(long t, long j) { return data_[(t - 1) * p_ + (j - 1)]; }      // 1-based (t, j)
    double at(long t, long j) const { return data_[(t - 1) * p_ + (j - 1)]; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    // Throws on NaN/Inf entries; detection entry points call this once.
    void validate_finite() const;

private:
    long t_ = 0;
    long p_ = 0;
    std::vector<double> data_;
};

// End trimming: d0 = [1, m], dv = [m+1, T-m], d1 = [T-m+1, T] with m = floor(T*epsilon).
struct SplitPlan {
    long T = 0;
    double epsilon = 0.0;
    double eta = 0.0;
    double gamma = 0.0;  // epsilon + eta
    long m = 0;
    long d0_lo = 0, d0_hi = 0;
    long dv_lo = 0, dv_hi = 0;
    long d1_lo = 0, d1_hi = 0;

    long dv_len() const { return dv_hi - dv_lo + 1; }
};

// Candidate change-point indices {floor(T*r) : r in [gamma, 1-gamma]} = all
// integers in [floor(T*gamma), floor(T*(1-gamma))].
struct CandidateGrid {
    long lo = 0;
    long hi = 0;

    long size() const { return hi - lo + 1; }
    bool contains(long k) const { return k >= lo && k <= hi; }
};

enum class ClassifierKind {
    logistic_l1,
    random_forest,
    constant_guess,
};

const char* classifier_kind_name(ClassifierKind kind);
ClassifierKind classifier_kind_from_name(const std::string& name);

struct RunConfig {
    double alpha = 0.05;
    std::uint64_t seed = 0;
    ClassifierKind classifier_kind = ClassifierKind::random_forest;
    double epsilon = 0.15;
    double eta = 0.05;
};

inline constexpr long kMinSeriesLength = 20;

SplitPlan make_split_plan(long T, double epsilon, double eta);
CandidateGrid candidate_grid(const SplitPlan& plan);

}  // namespace changeauc
