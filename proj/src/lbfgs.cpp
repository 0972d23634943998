#include "ddnn/lbfgs.hpp"

#include <cmath>
#include <deque>

#include "ddnn/error.hpp"

namespace ddnn {

namespace {

struct Pair {
  VecD s, y;
  double rho;  // 1 / y^T s
};

VecD two_loop_direction(const std::deque<Pair>& history, const VecD& grad) {
  VecD q = grad;
  const int m = static_cast<int>(history.size());
  VecD alpha(m);
  for (int i = m - 1; i >= 0; --i) {
    alpha[i] = history[i].rho * dot(history[i].s, q);
    axpy(-alpha[i], history[i].y, q);
  }
  if (m > 0) {
    const Pair& last = history.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (auto& v : q) v *= gamma;
  }
  for (int i = 0; i < m; ++i) {
    const double beta = history[i].rho * dot(history[i].y, q);
    axpy(alpha[i] - beta, history[i].s, q);
  }
  for (auto& v : q) v = -v;
  return q;
}

struct LineSearchOut {
  bool ok = false;
  double step = 0.0;
  double loss = 0.0;
  VecD theta, grad;
};

LineSearchOut line_search(const LossFn& f, const VecD& theta, const VecD& dir,
                          double loss0, double dphi0, const LbfgsConfig& cfg) {
  LineSearchOut out;
  out.theta.resize(theta.size());
  out.grad.resize(theta.size());

  const auto eval = [&](double step, double& loss) {
    for (std::size_t i = 0; i < theta.size(); ++i)
      out.theta[i] = theta[i] + step * dir[i];
    loss = f(out.theta, out.grad);
    return std::isfinite(loss);
  };

  double step = 1.0;
  double loss = 0.0;
  bool finite = eval(1.0, loss);

  // Quadratic interpolation through (phi(0), phi'(0), phi(1)); this is the
  // exact line minimizer when the objective is quadratic along the ray.
  if (finite) {
    const double curv = loss - loss0 - dphi0;
    if (curv > 0.0) {
      const double step_q = -dphi0 / (2.0 * curv);
      if (step_q > 1e-3 && step_q < 1e6 && std::fabs(step_q - 1.0) > 1e-12) {
        double loss_q = 0.0;
        VecD grad1 = out.grad, theta1 = out.theta;
        if (eval(step_q, loss_q) && loss_q < loss) {
          step = step_q;
          loss = loss_q;
        } else {
          out.theta = std::move(theta1);
          out.grad = std::move(grad1);
          finite = std::isfinite(loss);
        }
      }
    }
  }

  for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
    if (finite && loss <= loss0 + cfg.armijo_c1 * step * dphi0) {
      out.ok = true;
      out.step = step;
      out.loss = loss;
      return out;
    }
    step *= cfg.shrink;
    finite = eval(step, loss);
  }
  return out;
}

}  // namespace

LbfgsResult lbfgs_minimize(const LossFn& f, VecD theta0, const LbfgsConfig& cfg,
                           const LbfgsCallback& callback) {
  const std::size_t n = theta0.size();
  LbfgsResult res;
  res.theta = std::move(theta0);

  VecD grad(n);
  res.loss = f(res.theta, grad);
  if (!std::isfinite(res.loss) || !all_finite(grad))
    fail(ErrorCode::kNumericalFailure, "non-finite loss at the initial point");
  res.mean_abs_grad = mean_abs(grad);
  if (res.mean_abs_grad <= cfg.grad_tol) {
    res.status = LbfgsStatus::kConverged;
    return res;
  }

  std::deque<Pair> history;

  while (res.iterations < cfg.max_iters) {
    VecD dir = two_loop_direction(history, grad);
    double dphi0 = dot(dir, grad);
    if (dphi0 >= 0.0) {
      // not a descent direction; drop the history
      history.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
      dphi0 = -dot(grad, grad);
    }

    LineSearchOut ls = line_search(f, res.theta, dir, res.loss, dphi0, cfg);
    if (!ls.ok && !history.empty()) {
      // restart: steepest descent with cleared history
      history.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
      dphi0 = -dot(grad, grad);
      ls = line_search(f, res.theta, dir, res.loss, dphi0, cfg);
    }
    if (!ls.ok) {
      res.status = LbfgsStatus::kLineSearchFailed;
      return res;  // best iterate so far (monotone by construction)
    }

    Pair pair;
    pair.s.resize(n);
    pair.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = ls.theta[i] - res.theta[i];
      pair.y[i] = ls.grad[i] - grad[i];
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-12 * std::sqrt(dot(pair.s, pair.s)) * std::sqrt(dot(pair.y, pair.y))) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > cfg.memory) history.pop_front();
    }

    res.theta = std::move(ls.theta);
    res.loss = ls.loss;
    grad = std::move(ls.grad);
    res.mean_abs_grad = mean_abs(grad);
    ++res.iterations;
    if (callback) callback(res.iterations, res.loss, res.mean_abs_grad);

    if (res.mean_abs_grad <= cfg.grad_tol) {
      res.status = LbfgsStatus::kConverged;
      return res;
    }
  }
  res.status = LbfgsStatus::kMaxIters;
  return res;
}

}  // namespace ddnn
