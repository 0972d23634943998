#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ddnn {

enum class Method { kLma, kAlma };

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// Everything a training run needs. JSON config files use exactly these key
/// names; unknown keys are rejected so typos fail loudly.
struct RunConfig {
  Method method = Method::kAlma;
  std::vector<int> splits = {3, 1};  // (k,l[,m])
  int hidden_width = 40;
  int hidden_depth = 2;
  int collocation = 10;

  double eps_pr = 1e-6;      // primal stationarity
  double eps_lambda = 1e-4;  // dual stationarity
  double eps_lin = 1e-4;     // LMA linearization feasibility
  double eps_ij = 1e-3;      // interface constraint fulfilment

  double alpha = 1e-2;  // LMA dual step size (Nadam)
  double rho = 1e-3;    // ALMA penalty / dual step

  int outer_iters = 100;  // K_m (loop runs k = 0..K_m)
  int dual_iters = 50;    // D_m
  int primal_iters = 20;  // P_m

  std::uint64_t seed = 0;
  int workers = 1;
  int gap_rows = 0;

  int mse_fit_iters = 500;
  int primal_lbfgs_iters = 100;
  int interface_fit_iters = 300;
  int lbfgs_memory = 10;

  std::string data_path;
  std::string out_dir;
  bool write_checkpoints = true;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

/// "3x1" or "1x1x2" -> {3,1} / {1,1,2}
std::vector<int> parse_split(const std::string& text);

}  // namespace ddnn
