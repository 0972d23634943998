#pragma once

#include <cstddef>

#include "ddnn/mat.hpp"

namespace ddnn {

struct NadamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct NadamState {
  VecD m, v;
  long t = 0;

  void reset(std::size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    t = 0;
  }
};

/// Nesterov-accelerated adaptive moment ascent step, entry-wise:
///
///   m <- b1 m + (1-b1) g,   v <- b2 v + (1-b2) g^2
///   lambda += alpha (b1 m_hat + (1-b1) g) / (sqrt(v_hat) + eps)
///
/// with the usual bias corrections m_hat = m/(1-b1^t), v_hat = v/(1-b2^t).
void nadam_step(VecD& lambda, const VecD& g, NadamState& state, double alpha,
                const NadamConfig& cfg = {});

}  // namespace ddnn
