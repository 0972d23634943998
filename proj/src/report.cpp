#include "ddnn/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ddnn/error.hpp"

namespace ddnn {

namespace {

nlohmann::json finite_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::kIoError, "write failure on " + path);
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::json report_to_json(const RunReport& report, const Dataset* eval_dataset,
                              const ErrorField* errors) {
  nlohmann::json j;
  j["schema"] = 1;
  j["config"] = report.config_echo;
  j["converged"] = report.converged;
  j["outer_iterations"] = report.outer_iterations;
  j["discarded_samples"] = report.discarded_samples;
  j["interface_gaps"] = report.interface_gaps;

  nlohmann::json iters = nlohmann::json::array();
  for (const auto& rec : report.iterations) {
    nlohmann::json it;
    it["k"] = rec.k;
    it["subdomain_loss"] = rec.subdomain_loss;
    it["primal_stationarity"] = rec.status.primal_stationarity;
    nlohmann::json dual = nlohmann::json::array();
    for (double v : rec.status.dual_stationarity) dual.push_back(finite_or_null(v));
    it["dual_stationarity"] = std::move(dual);
    it["dual_evaluable"] = rec.status.dual_evaluable;
    it["interface_mean_abs_q"] = rec.status.interface_mean_abs_q;
    it["converged"] = rec.status.converged;
    iters.push_back(std::move(it));
  }
  j["iterations"] = std::move(iters);

  if (errors != nullptr && eval_dataset != nullptr) {
    j["final"] = {{"max_e_rel", errors->max_e_rel},
                  {"mean_e_rel", errors->mean_e_rel},
                  {"argmax_row", errors->argmax_row},
                  {"rows", eval_dataset->rows()}};
  }
  return j;
}

void emit_report(const RunReport& report, const std::string& out_dir,
                 const Dataset* eval_dataset, const ErrorField* errors) {
  std::filesystem::create_directories(out_dir);

  write_text(out_dir + "/report.json",
             report_to_json(report, eval_dataset, errors).dump(2) + "\n");

  nlohmann::json t;
  t["total_ms"] = report.total_ms;
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& p : report.timings)
    phases.push_back({{"predict_ms", p.predict_ms},
                      {"solve_ms", p.solve_ms},
                      {"interface_ms", p.interface_ms},
                      {"check_ms", p.check_ms}});
  t["iterations"] = std::move(phases);
  write_text(out_dir + "/timings.json", t.dump(2) + "\n");

  for (std::size_t i = 0; i < report.traces.size(); ++i) {
    std::string csv =
        "outer_iter,dual_iter,primal_iter,loss,mean_abs_grad,mean_abs_q,delta_q,"
        "wall_ms\n";
    for (const auto& row : report.traces[i]) {
      csv += std::to_string(row.outer_iter) + ',' + std::to_string(row.dual_iter) +
             ',' + std::to_string(row.primal_updates) + ',' + g17(row.loss) + ',' +
             g17(row.mean_abs_grad) + ',' + g17(row.mean_abs_q) + ',' +
             (std::isnan(row.delta_q) ? "nan" : g17(row.delta_q)) + ',' +
             g17(row.wall_ms) + '\n';
    }
    write_text(out_dir + "/trace_sub_" + std::to_string(i) + ".csv", csv);
  }

  if (eval_dataset != nullptr && errors != nullptr) {
    const Dataset& ds = *eval_dataset;
    const char* names[] = {"x", "y", "z"};
    std::string csv;
    for (int a = 0; a < ds.spatial_dim; ++a) {
      csv += names[a];
      csv += ',';
    }
    csv += "e_rel";
    if (ds.out_dim > 1)
      for (int c = 0; c < ds.out_dim; ++c) csv += ",e_rel_u" + std::to_string(c + 1);
    csv += '\n';
    for (int r = 0; r < ds.rows(); ++r) {
      for (int a = 0; a < ds.spatial_dim; ++a) csv += g17(ds.X(r, a)) + ",";
      csv += g17(errors->e_rel[r]);
      if (ds.out_dim > 1)
        for (int c = 0; c < ds.out_dim; ++c)
          csv += "," + g17(errors->e_rel_components(r, c));
      csv += '\n';
    }
    write_text(out_dir + "/error_grid.csv", csv);
  }
}

}  // namespace ddnn
