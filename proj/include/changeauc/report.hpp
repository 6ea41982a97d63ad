#pragma once

#include "json.hpp"

#include "changeauc/auc_scan.hpp"
#include "changeauc/cusum.hpp"
#include "changeauc/multi_cp.hpp"
#include "changeauc/null_dist.hpp"
#include "changeauc/simbench.hpp"

namespace changeauc {

// All JSON output goes through ordered_json so key order (and hence the byte
// stream) is fixed by construction order, not by hashing.
using json = nlohmann::ordered_json;

json to_json(const SplitPlan& plan);
json to_json(const AucCurve& curve, bool emit_curve);
json to_json(const CusumCurve& curve, bool emit_curve);
json to_json(const SingleCpReport& report, bool emit_curve);
json to_json(const MultiCpReport& report);
json to_json(const NullQuantileTable& table);
json to_json(const ExperimentResult& result);

// Wraps a result in the standard envelope. Anything run-dependent (wall-clock
// times) lives under the top-level "timing" key so callers can strip it when
// comparing runs.
json make_envelope(const std::string& command, json config, json result, json timing);

// Serialize with a fixed layout (2-space indent, '\n'-terminated).
std::string dump_report(const json& doc);

// Drops the volatile "timing" subtree; used when checking reproducibility.
json strip_timing(json doc);

}  // namespace changeauc
