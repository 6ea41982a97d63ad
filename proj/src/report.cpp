#include "changeauc/report.hpp"

#include "changeauc/version.hpp"

namespace changeauc {

json to_json(const SplitPlan& plan) {
    json j;
    j["T"] = plan.T;
    j["epsilon"] = plan.epsilon;
    j["eta"] = plan.eta;
    j["gamma"] = plan.gamma;
    j["m"] = plan.m;
    j["d0"] = {plan.d0_lo, plan.d0_hi};
    j["dv"] = {plan.dv_lo, plan.dv_hi};
    j["d1"] = {plan.d1_lo, plan.d1_hi};
    return j;
}

json to_json(const AucCurve& curve, bool emit_curve) {
    json j;
    j["grid"] = {{"lo", curve.grid.lo}, {"hi", curve.grid.hi}};
    j["q_hat"] = curve.q_hat;
    j["r_hat"] = curve.r_hat;
    j["scaled_stat"] = curve.scaled_stat;
    if (emit_curve) j["psi"] = curve.psi;
    return j;
}

json to_json(const CusumCurve& curve, bool emit_curve) {
    json j;
    j["grid"] = {{"lo", curve.grid.lo}, {"hi", curve.grid.hi}};
    j["v_hat"] = curve.v_hat;
    j["max_abs"] = curve.max_abs;
    j["argmax_k"] = curve.argmax_k;
    j["degenerate_variance"] = curve.degenerate_variance;
    if (emit_curve) j["phi"] = curve.phi;
    return j;
}

json to_json(const SingleCpReport& report, bool emit_curve) {
    json j;
    j["reject"] = report.reject;
    j["alpha"] = report.alpha;
    j["critical_value"] = report.critical_value;
    j["scaled_stat"] = report.scaled_stat;
    j["r_hat"] = report.r_hat;
    j["grid"] = {{"lo", report.curve.grid.lo}, {"hi", report.curve.grid.hi}};
    if (!report.cusum_phi.empty()) {
        if (emit_curve) j["phi"] = report.cusum_phi;
    } else {
        j["q_hat"] = report.curve.q_hat;
        if (emit_curve) j["psi"] = report.curve.psi;
    }
    return j;
}

json to_json(const MultiCpReport& report) {
    json j;
    j["tau_hat"] = report.tau_hat;
    j["n_detected"] = static_cast<long>(report.tau_hat.size());
    j["max_depth"] = report.max_depth;
    json audit = json::array();
    for (const auto& d : report.audit) {
        json node;
        node["lo"] = d.lo;
        node["hi"] = d.hi;
        node["depth"] = d.depth;
        node["status"] = d.status;
        node["intervals_scanned"] = d.intervals_scanned;
        node["intervals_skipped"] = d.intervals_skipped;
        if (d.status != "too-short") {
            node["best_q"] = d.best_q;
            node["best_interval"] = {d.best_interval_lo, d.best_interval_hi};
            node["delta"] = d.delta;
        }
        if (d.status == "detected") node["r_hat"] = d.r_hat;
        audit.push_back(std::move(node));
    }
    j["audit"] = std::move(audit);
    return j;
}

json to_json(const NullQuantileTable& table) {
    json j;
    j["kind"] = table_kind_name(table.kind);
    j["gamma"] = table.gamma;
    j["epsilon"] = table.epsilon;
    j["knots"] = table.knots;
    j["reps"] = table.reps;
    j["seed"] = table.seed;
    json q = json::array();
    for (const auto& [alpha, value] : table.quantiles)
        q.push_back({{"alpha", alpha}, {"value", value}});
    j["quantiles"] = std::move(q);
    return j;
}

json to_json(const ExperimentResult& result) {
    json j;
    j["rep_count"] = result.rep_count;
    j["rejection_rate"] = result.rejection_rate;
    if (!result.ari_samples.empty()) {
        j["median_ari"] = median(result.ari_samples);
        j["median_abs_localization_error"] = median(result.localization_errors);
        j["ari"] = result.ari_samples;
        j["abs_localization_error"] = result.localization_errors;
    }
    return j;
}

json make_envelope(const std::string& command, json config, json result, json timing) {
    json j;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["config"] = std::move(config);
    j["result"] = std::move(result);
    j["timing"] = std::move(timing);
    return j;
}

std::string dump_report(const json& doc) { return doc.dump(2) + "\n"; }

json strip_timing(json doc) {
    doc.erase("timing");
    return doc;
}

}  // namespace changeauc
