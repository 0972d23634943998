#include "ddnn/config.hpp"

#include <fstream>
#include <set>

#include "ddnn/error.hpp"

namespace ddnn {

std::string method_name(Method m) { return m == Method::kLma ? "lma" : "alma"; }

Method parse_method(const std::string& name) {
  if (name == "lma") return Method::kLma;
  if (name == "alma") return Method::kAlma;
  fail(ErrorCode::kInvalidConfig, "unknown method '" + name + "' (use lma or alma)");
}

std::vector<int> parse_split(const std::string& text) {
  std::vector<int> out;
  std::string cur;
  for (char ch : text + "x") {
    if (ch == 'x') {
      if (cur.empty()) fail(ErrorCode::kInvalidConfig, "bad split '" + text + "'");
      try {
        out.push_back(std::stoi(cur));
      } catch (const std::exception&) {
        fail(ErrorCode::kInvalidConfig, "bad split '" + text + "'");
      }
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (out.size() < 2 || out.size() > 3)
    fail(ErrorCode::kInvalidConfig, "split needs 2 or 3 counts, got '" + text + "'");
  return out;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["method"] = method_name(c.method);
  j["split"] = c.splits;
  j["hidden_width"] = c.hidden_width;
  j["hidden_depth"] = c.hidden_depth;
  j["collocation"] = c.collocation;
  j["eps_pr"] = c.eps_pr;
  j["eps_lambda"] = c.eps_lambda;
  j["eps_lin"] = c.eps_lin;
  j["eps_ij"] = c.eps_ij;
  j["alpha"] = c.alpha;
  j["rho"] = c.rho;
  j["outer_iters"] = c.outer_iters;
  j["dual_iters"] = c.dual_iters;
  j["primal_iters"] = c.primal_iters;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["gap_rows"] = c.gap_rows;
  j["mse_fit_iters"] = c.mse_fit_iters;
  j["primal_lbfgs_iters"] = c.primal_lbfgs_iters;
  j["interface_fit_iters"] = c.interface_fit_iters;
  j["lbfgs_memory"] = c.lbfgs_memory;
  j["data"] = c.data_path;
  j["out_dir"] = c.out_dir;
  j["write_checkpoints"] = c.write_checkpoints;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "method",          "split",          "hidden_width",
      "hidden_depth",    "collocation",    "eps_pr",
      "eps_lambda",      "eps_lin",        "eps_ij",
      "alpha",           "rho",            "outer_iters",
      "dual_iters",      "primal_iters",   "seed",
      "workers",         "gap_rows",       "mse_fit_iters",
      "primal_lbfgs_iters", "interface_fit_iters", "lbfgs_memory",
      "data",            "out_dir",        "write_checkpoints"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      fail(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");

  RunConfig c;
  try {
    if (j.contains("method")) c.method = parse_method(j["method"].get<std::string>());
    if (j.contains("split")) {
      if (j["split"].is_string())
        c.splits = parse_split(j["split"].get<std::string>());
      else
        c.splits = j["split"].get<std::vector<int>>();
    }
    if (j.contains("hidden_width")) c.hidden_width = j["hidden_width"].get<int>();
    if (j.contains("hidden_depth")) c.hidden_depth = j["hidden_depth"].get<int>();
    if (j.contains("collocation")) c.collocation = j["collocation"].get<int>();
    if (j.contains("eps_pr")) c.eps_pr = j["eps_pr"].get<double>();
    if (j.contains("eps_lambda")) c.eps_lambda = j["eps_lambda"].get<double>();
    if (j.contains("eps_lin")) c.eps_lin = j["eps_lin"].get<double>();
    if (j.contains("eps_ij")) c.eps_ij = j["eps_ij"].get<double>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("rho")) c.rho = j["rho"].get<double>();
    if (j.contains("outer_iters")) c.outer_iters = j["outer_iters"].get<int>();
    if (j.contains("dual_iters")) c.dual_iters = j["dual_iters"].get<int>();
    if (j.contains("primal_iters")) c.primal_iters = j["primal_iters"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("gap_rows")) c.gap_rows = j["gap_rows"].get<int>();
    if (j.contains("mse_fit_iters")) c.mse_fit_iters = j["mse_fit_iters"].get<int>();
    if (j.contains("primal_lbfgs_iters"))
      c.primal_lbfgs_iters = j["primal_lbfgs_iters"].get<int>();
    if (j.contains("interface_fit_iters"))
      c.interface_fit_iters = j["interface_fit_iters"].get<int>();
    if (j.contains("lbfgs_memory")) c.lbfgs_memory = j["lbfgs_memory"].get<int>();
    if (j.contains("data")) c.data_path = j["data"].get<std::string>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("write_checkpoints"))
      c.write_checkpoints = j["write_checkpoints"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidConfig, std::string("bad config value: ") + e.what());
  }

  if (c.hidden_width < 1 || c.hidden_depth < 1)
    fail(ErrorCode::kInvalidConfig, "network needs positive width and depth");
  if (c.eps_pr <= 0 || c.eps_lambda <= 0 || c.eps_lin <= 0 || c.eps_ij <= 0)
    fail(ErrorCode::kInvalidConfig, "tolerances must be positive");
  if (c.alpha <= 0 || c.rho <= 0)
    fail(ErrorCode::kInvalidConfig, "step sizes alpha and rho must be positive");
  if (c.outer_iters < 0 || c.dual_iters < 0 || c.primal_iters < 1)
    fail(ErrorCode::kInvalidConfig, "iteration caps out of range");
  if (c.workers < 1) fail(ErrorCode::kInvalidConfig, "workers must be at least 1");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace ddnn
