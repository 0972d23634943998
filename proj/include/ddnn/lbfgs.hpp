#pragma once

#include <functional>

#include "ddnn/mat.hpp"

namespace ddnn {

struct LbfgsConfig {
  int memory = 10;
  int max_iters = 500;
  /// Convergence test on the mean absolute gradient entry.
  double grad_tol = 1e-6;
  double armijo_c1 = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 30;
};

enum class LbfgsStatus { kConverged, kMaxIters, kLineSearchFailed };

struct LbfgsResult {
  VecD theta;
  double loss = 0.0;
  double mean_abs_grad = 0.0;
  int iterations = 0;
  LbfgsStatus status = LbfgsStatus::kConverged;
};

/// Evaluates the objective and fills the gradient (same length as theta).
using LossFn = std::function<double(const VecD& theta, VecD& grad)>;

/// Optional per-iteration observer (iter, loss, mean_abs_grad).
using LbfgsCallback = std::function<void(int, double, double)>;

/// Limited-memory BFGS with two-loop recursion and a backtracking Armijo
/// line search that also tries the one-dimensional quadratic-interpolation
/// step (exact on quadratic objectives). On line-search failure the history
/// is cleared and one steepest-descent restart is attempted; a second
/// failure returns the best iterate with kLineSearchFailed.
LbfgsResult lbfgs_minimize(const LossFn& f, VecD theta0, const LbfgsConfig& cfg,
                           const LbfgsCallback& callback = {});

}  // namespace ddnn
