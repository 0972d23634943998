#include "ddnn/nadam.hpp"

#include <cmath>

#include "ddnn/error.hpp"

namespace ddnn {

void nadam_step(VecD& lambda, const VecD& g, NadamState& state, double alpha,
                const NadamConfig& cfg) {
  if (!all_finite(g)) fail(ErrorCode::kNumericalFailure, "non-finite dual gradient");
  if (g.size() != lambda.size())
    fail(ErrorCode::kShapeMismatch, "gradient length does not match multipliers");
  if (state.m.size() != g.size()) state.reset(g.size());

  ++state.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < g.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    lambda[i] += alpha * (cfg.beta1 * m_hat + (1.0 - cfg.beta1) * g[i]) /
                 (std::sqrt(v_hat) + cfg.eps);
  }
}

}  // namespace ddnn
