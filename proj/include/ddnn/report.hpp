#pragma once

#include <optional>
#include <string>

#include "ddnn/metrics.hpp"
#include "ddnn/orchestrator.hpp"

namespace ddnn {

/// Writes run artifacts into `out_dir`:
///   report.json    criteria history and final errors (deterministic bytes)
///   timings.json   wall-clock per phase (excluded from determinism)
///   trace_sub_<i>.csv  per-subdomain optimizer trace
/// and, when an error field is supplied,
///   error_grid.csv x,y[,z],e_rel[,e_rel_u1,...] rows for heatmap plotting.
/// Overwrites are idempotent: emitting the same run twice yields identical
/// files (timings.json aside).
void emit_report(const RunReport& report, const std::string& out_dir,
                 const Dataset* eval_dataset = nullptr,
                 const ErrorField* errors = nullptr);

nlohmann::json report_to_json(const RunReport& report,
                              const Dataset* eval_dataset = nullptr,
                              const ErrorField* errors = nullptr);

}  // namespace ddnn
