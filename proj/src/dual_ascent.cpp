#include "ddnn/dual_ascent.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ddnn/error.hpp"

namespace ddnn {

DualAscentResult dual_ascent(VecD theta0, VecD lambda0, const DualProblem& prob,
                             const DualAscentConfig& cfg,
                             NadamState* nadam_state) {
  DualAscentResult res;
  res.theta = std::move(theta0);
  res.lambda = std::move(lambda0);

  VecD prev_q;
  bool have_prev_q = false;

  for (int d = 0; d <= cfg.max_dual_iters; ++d) {
    const bool single_pass = all_zero(res.lambda);
    try {
      res.theta = single_pass ? prob.fit_unconstrained(res.theta)
                              : prob.primal_update(res.theta, res.lambda);
    } catch (const Error& e) {
      throw Error(e.code(), "primal update failed at dual iteration " +
                                std::to_string(d) + ": " + e.what());
    }

    VecD q = prob.residual(res.theta);
    if (!all_finite(q))
      fail(ErrorCode::kNumericalFailure,
           "non-finite constraint residual at dual iteration " + std::to_string(d));

    DualTraceRow row;
    row.dual_iter = d;
    row.mean_abs_q = mean_abs(q);
    row.delta_q = have_prev_q
                      ? [&] {
                          double s = 0.0;
                          for (std::size_t i = 0; i < q.size(); ++i)
                            s += std::fabs(q[i] - prev_q[i]);
                          return q.empty() ? 0.0 : s / static_cast<double>(q.size());
                        }()
                      : std::numeric_limits<double>::quiet_NaN();
    prev_q = q;
    have_prev_q = true;

    if (cfg.update == DualUpdateRule::kNadam) {
      if (nadam_state == nullptr)
        fail(ErrorCode::kInvalidConfig, "nadam dual updates need persistent state");
      nadam_step(res.lambda, q, *nadam_state, cfg.alpha, cfg.nadam);
    } else {
      for (std::size_t i = 0; i < q.size(); ++i) res.lambda[i] += cfg.rho * q[i];
    }

    row.stationarity = prob.stationarity(res.theta, res.lambda);
    res.trace.push_back(row);
    res.dual_iters = d + 1;

    res.converged = row.mean_abs_q < cfg.eps_lambda && row.stationarity < cfg.eps_primal;
    if (res.converged || single_pass) break;
  }
  return res;
}

namespace {

MlpNetwork with_params(const MlpNetwork& arch, VecD theta) {
  MlpNetwork net = arch;
  net.params = std::move(theta);
  return net;
}

}  // namespace

VecD primal_update_lma(const MlpNetwork& arch, VecD theta, const VecD& lambda,
                       const Mat& X, const Mat& U, const ConstraintContext& ctx,
                       const PrimalUpdateConfig& cfg,
                       std::vector<PrimalTraceRow>* trace) {
  LbfgsConfig lcfg = cfg.lbfgs;
  lcfg.grad_tol = cfg.eps_primal;

  if (all_zero(lambda)) {
    // The constraint term vanishes; one unconstrained solve of J.
    const LossFn loss_fn = [&](const VecD& th, VecD& grad) {
      return mse_loss(with_params(arch, th), X, U, grad);
    };
    const LbfgsResult lb = lbfgs_minimize(loss_fn, std::move(theta), lcfg);
    if (trace)
      trace->push_back({0, lb.loss, lb.mean_abs_grad, 0.0, true, lb.iterations});
    return lb.theta;
  }

  VecD theta_ref = std::move(theta);
  LinearizedConstraint lin =
      linearize_constraints(with_params(arch, theta_ref), theta_ref, ctx);
  bool lin_fresh = true;
  bool accepted_any = false;
  double last_gap = 0.0;

  const auto gap_at = [&](const VecD& th) {
    const VecD q_true = constraint_residual(with_params(arch, th), ctx);
    const VecD q_bar = lin.evaluate(th);
    double gap = 0.0;
    for (std::size_t i = 0; i < q_true.size(); ++i)
      gap += std::fabs(q_bar[i] - q_true[i]);
    return q_true.empty() ? 0.0 : gap / static_cast<double>(q_true.size());
  };

  for (int p = 0; p < cfg.max_outer; ++p) {
    if (!lin_fresh) {
      lin = linearize_constraints(with_params(arch, theta_ref), theta_ref, ctx);
      lin_fresh = true;
    }

    const LossFn loss_fn = [&](const VecD& th, VecD& grad) {
      return linearized_lagrangian(with_params(arch, th), lambda, X, U, lin, grad);
    };
    const LbfgsResult lb = lbfgs_minimize(loss_fn, theta_ref, lcfg);

    VecD theta_new = lb.theta;
    double gap = gap_at(theta_new);
    bool full_step = true;
    if (gap >= cfg.eps_lin) {
      // Discard the update and backtrack toward the last feasible iterate
      // until the linearization holds again; the gap is O(step^2).
      full_step = false;
      VecD theta_try(theta_ref.size());
      for (double beta = 0.5; beta > 1e-9; beta *= 0.5) {
        for (std::size_t i = 0; i < theta_try.size(); ++i)
          theta_try[i] = theta_ref[i] + beta * (lb.theta[i] - theta_ref[i]);
        gap = gap_at(theta_try);
        if (gap < cfg.eps_lin) {
          theta_new = theta_try;
          break;
        }
      }
    }
    last_gap = gap;
    const bool feasible = gap < cfg.eps_lin;
    if (trace)
      trace->push_back({p, lb.loss, lb.mean_abs_grad, gap, feasible, lb.iterations});

    if (feasible) {
      const bool moved = theta_new != theta_ref;
      theta_ref = std::move(theta_new);
      lin_fresh = false;
      accepted_any = true;
      if (full_step && lb.mean_abs_grad < cfg.eps_primal) return theta_ref;
      if (!moved || (full_step && lb.iterations == 0)) return theta_ref;
    }
  }

  if (!accepted_any)
    fail(ErrorCode::kLmaStall,
         "no feasible linearized step found in " + std::to_string(cfg.max_outer) +
             " relinearizations (last gap " + std::to_string(last_gap) + ")");
  return theta_ref;
}

VecD primal_update_alma(const MlpNetwork& arch, VecD theta, const VecD& lambda,
                        double rho, const Mat& X, const Mat& U,
                        const ConstraintContext& ctx,
                        const PrimalUpdateConfig& cfg,
                        std::vector<PrimalTraceRow>* trace) {
  const LossFn loss_fn = [&](const VecD& th, VecD& grad) {
    return augmented_lagrangian(with_params(arch, th), lambda, rho, X, U, ctx, grad);
  };

  LbfgsConfig lcfg = cfg.lbfgs;
  lcfg.grad_tol = cfg.eps_primal;
  for (int p = 0; p < cfg.max_outer; ++p) {
    const LbfgsResult lb = lbfgs_minimize(loss_fn, std::move(theta), lcfg);
    theta = lb.theta;
    if (trace)
      trace->push_back({p, lb.loss, lb.mean_abs_grad, 0.0, true, lb.iterations});
    if (lb.mean_abs_grad < cfg.eps_primal) break;
    if (lb.status == LbfgsStatus::kLineSearchFailed) break;  // stuck; keep best
  }
  return theta;
}

}  // namespace ddnn
