#pragma once

#include <functional>
#include <vector>

#include "ddnn/lbfgs.hpp"
#include "ddnn/mat.hpp"
#include "ddnn/mlp.hpp"
#include "ddnn/nadam.hpp"
#include "ddnn/objectives.hpp"

namespace ddnn {

enum class DualUpdateRule {
  kNadam,    // lambda += alpha * nadam_direction(Q)
  kPenalty,  // lambda += rho * Q (steepest ascent)
};

struct DualAscentConfig {
  double alpha = 1e-2;          // dual step size (nadam rule)
  double rho = 1e-3;            // penalty / dual step (penalty rule)
  int max_dual_iters = 50;      // D_m; the loop runs d = 0..D_m
  double eps_lambda = 1e-4;     // tolerance on E|Q|
  double eps_primal = 1e-6;     // tolerance on E|grad L|
  DualUpdateRule update = DualUpdateRule::kPenalty;
  NadamConfig nadam;
};

/// Problem hooks so the driver stays testable on toy problems and reusable
/// across both primal variants.
struct DualProblem {
  /// lambda = 0 branch: plain fit of the primal objective.
  std::function<VecD(const VecD& theta)> fit_unconstrained;
  /// Constrained primal update for fixed lambda.
  std::function<VecD(const VecD& theta, const VecD& lambda)> primal_update;
  /// Q(theta).
  std::function<VecD(const VecD& theta)> residual;
  /// E|grad_theta L(theta, lambda)| for the convergence check.
  std::function<double(const VecD& theta, const VecD& lambda)> stationarity;
};

struct DualTraceRow {
  int dual_iter = 0;
  double mean_abs_q = 0.0;
  double stationarity = 0.0;
  double delta_q = 0.0;  // E|Q_d - Q_{d-1}|, NaN on the first iteration
};

struct DualAscentResult {
  VecD theta;
  VecD lambda;
  int dual_iters = 0;
  bool converged = false;
  std::vector<DualTraceRow> trace;
};

/// Alternates primal updates with multiplier ascent. When lambda starts at
/// zero the primal pass is the unconstrained fit and the loop ends after one
/// iteration (with its dual update). `nadam_state` carries the dual optimizer
/// moments across calls; it may be null for the penalty rule.
DualAscentResult dual_ascent(VecD theta0, VecD lambda0, const DualProblem& prob,
                             const DualAscentConfig& cfg,
                             NadamState* nadam_state = nullptr);

/// ---- primal updates on network objectives ----

struct PrimalTraceRow {
  int primal_iter = 0;
  double loss = 0.0;
  double mean_abs_grad = 0.0;
  double lin_gap = 0.0;  // LMA only
  bool accepted = true;
  int lbfgs_iters = 0;
};

struct PrimalUpdateConfig {
  int max_outer = 20;        // P_m
  double eps_primal = 1e-6;  // eps_pr
  double eps_lin = 1e-4;     // eps_l (LMA feasibility)
  LbfgsConfig lbfgs;
};

/// Alg.: relinearize the constraints at the current feasible point, minimize
/// the linearized Lagrangian with L-BFGS, and keep the result only while the
/// linearization stays valid; infeasible solves fall back to the last
/// feasible iterate with a halved solve budget.
VecD primal_update_lma(const MlpNetwork& arch, VecD theta, const VecD& lambda,
                       const Mat& X, const Mat& U, const ConstraintContext& ctx,
                       const PrimalUpdateConfig& cfg,
                       std::vector<PrimalTraceRow>* trace = nullptr);

/// Repeated L-BFGS solves of the augmented Lagrangian (restart pattern).
VecD primal_update_alma(const MlpNetwork& arch, VecD theta, const VecD& lambda,
                        double rho, const Mat& X, const Mat& U,
                        const ConstraintContext& ctx,
                        const PrimalUpdateConfig& cfg,
                        std::vector<PrimalTraceRow>* trace = nullptr);

}  // namespace ddnn
