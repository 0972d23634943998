#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ddnn/config.hpp"
#include "ddnn/dataset.hpp"
#include "ddnn/dual_ascent.hpp"
#include "ddnn/partition.hpp"

namespace ddnn {

/// Full state of a decomposed surrogate: one local net per subdomain, one
/// interface net per facet, multipliers and dual-optimizer moments per
/// subdomain. Multiplier entries follow the subdomain's constraint layout
/// (adjacent interfaces ascending, then eval point / component / {value,
/// derivative}).
struct DdmModel {
  Partition partition;
  std::vector<int> splits;  // original (k,l[,m]) tuple
  int collocation = 10;
  NormalizeTransform transform;
  Method method = Method::kAlma;
  double rho = 1e-3;
  std::vector<MlpNetwork> local_nets;
  std::vector<MlpNetwork> interface_nets;
  std::vector<VecD> lambdas;
  std::vector<NadamState> dual_states;
  std::vector<VecD> param_samples;  // training parameter samples (sample-major)
  int outer_iter = 0;

  /// Collocation points replicated per parameter sample, as network inputs.
  Mat interface_eval_points(int interface_id) const;
};

struct InterfacePredictions {
  std::vector<Mat> values;
  std::vector<Mat> derivs;
};

struct ConvergenceStatus {
  bool converged = false;
  bool dual_evaluable = false;
  VecD primal_stationarity;   // per subdomain, E|grad L_i|
  VecD dual_stationarity;     // per subdomain, E|Q(new) - Q(old)| (NaN if n/a)
  VecD interface_mean_abs_q;  // per interface, over both adjacent subdomains
};

struct IterationRecord {
  int k = 0;
  VecD subdomain_loss;  // J_i at theta^{k+1}
  ConvergenceStatus status;
};

struct PhaseTimings {
  double predict_ms = 0.0;
  double solve_ms = 0.0;
  double interface_ms = 0.0;
  double check_ms = 0.0;
};

struct SubdomainTraceRow {
  int outer_iter = 0;
  int dual_iter = 0;
  int primal_updates = 0;
  double loss = 0.0;        // J_i after the primal update
  double mean_abs_grad = 0.0;
  double mean_abs_q = 0.0;
  double delta_q = 0.0;
  double wall_ms = 0.0;
};

struct RunReport {
  nlohmann::json config_echo;
  std::vector<IterationRecord> iterations;
  bool converged = false;
  int outer_iterations = 0;
  int discarded_samples = 0;
  VecD interface_gaps;
  std::vector<std::vector<SubdomainTraceRow>> traces;  // per subdomain
  std::vector<PhaseTimings> timings;  // wall clock; excluded from determinism
  double total_ms = 0.0;
};

std::uint64_t local_net_seed(std::uint64_t run_seed, int subdomain);
std::uint64_t interface_net_seed(std::uint64_t run_seed, int interface);

/// Values and normal derivatives of every interface net at its evaluation
/// points; pure read of the current model.
InterfacePredictions predict_interfaces(const DdmModel& model);

/// L-BFGS fit of one interface net against its two frozen neighbours.
MlpNetwork fit_interface(const MlpNetwork& iface_net, const MlpNetwork& left,
                         const MlpNetwork& right, const Mat& eval_points,
                         const VecD& eta_padded, const LbfgsConfig& cfg);

/// The three global criteria of the outer loop, evaluated against the NEW
/// interface predictions. Dual stationarity needs the previous parameters;
/// on the first iteration (with constraints present) it is not evaluable and
/// the status stays `continue`.
ConvergenceStatus check_convergence(const DdmModel& model,
                                    const std::vector<LocalDataset>& locals,
                                    const std::vector<VecD>& prev_params,
                                    const InterfacePredictions& preds,
                                    const RunConfig& cfg, bool dual_evaluable);

/// Routed inference in normalized coordinates: interface points use the
/// interface net, interior points the owning subdomain's net.
VecD evaluate_global(const DdmModel& model, std::span<const double> spatial,
                     std::span<const double> zeta = {});

/// Convenience wrapper over raw (unnormalized) inputs and outputs.
VecD predict_raw(const DdmModel& model, std::span<const double> spatial,
                 std::span<const double> zeta = {});

/// The outer substructuring loop: predict interfaces, solve every subdomain
/// concurrently against frozen predictions, refit interface nets, check
/// convergence. The dataset is normalized in place if it is not already.
std::pair<DdmModel, RunReport> run_ddm(const RunConfig& cfg, Dataset dataset);

}  // namespace ddnn
