#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ddnn/mat.hpp"

namespace ddnn {

enum class Activation { kSwish, kIdentity };

double swish(double x);
double swish_d1(double x);
double swish_d2(double x);

/// Feedforward network with a flat parameter vector.
///
/// Parameter layout is layer-major, weights before biases:
///   [W1 (m1 x m0, row-major), b1, W2, b2, ..., WL, bL]
/// Hidden layers apply the activation element-wise; the output layer is
/// purely affine. All evaluation routines are pure and thread-safe on an
/// immutable network.
struct MlpNetwork {
  std::vector<int> layer_widths;
  Activation activation = Activation::kSwish;
  VecD params;
  std::uint64_t init_seed = 0;

  int input_dim() const { return layer_widths.front(); }
  int output_dim() const { return layer_widths.back(); }
  int num_layers() const { return static_cast<int>(layer_widths.size()) - 1; }

  static std::size_t param_count(const std::vector<int>& widths);
};

/// He-normal weights (std sqrt(2/fan_in)), zero biases. Deterministic per seed.
VecD init_params(const std::vector<int>& widths, std::uint64_t seed);

MlpNetwork make_network(std::vector<int> widths, Activation act, std::uint64_t seed);

/// Unit direction in the spatial part of the input space. Networks with
/// parameter inputs see the direction zero-padded to the full input width.
struct NormalDirection {
  VecD dir;
  explicit NormalDirection(VecD d);
};

VecD pad_normal(const NormalDirection& normal, int input_dim);

/// Reusable scratch buffers for the forward / tangent / adjoint passes.
/// One instance per thread; sized lazily to the network.
struct MlpWorkspace {
  std::vector<VecD> z;   // activations, z[0] = input
  std::vector<VecD> h;   // pre-activations, h[k] for layer k >= 1
  std::vector<VecD> s;   // tangent pre-activations
  std::vector<VecD> t;   // tangent activations, t[0] = direction
  std::vector<VecD> bh;  // adjoints of h
  std::vector<VecD> bs;  // adjoints of s
  VecD bz, bt;           // layer-local adjoints of z and t
};

void forward(const MlpNetwork& net, std::span<const double> x, MlpWorkspace& ws,
             VecD& out);
VecD forward(const MlpNetwork& net, std::span<const double> x);

/// Value and directional derivative along a (padded) input direction in one
/// combined forward/tangent pass.
void forward_with_normal(const MlpNetwork& net, std::span<const double> x,
                         std::span<const double> eta_padded, MlpWorkspace& ws,
                         VecD& value, VecD& normal_der);
VecD normal_derivative(const MlpNetwork& net, std::span<const double> x,
                       const NormalDirection& normal);

/// d(output)/d(params); one row per output component, columns in params order.
Mat grad_params(const MlpNetwork& net, std::span<const double> x);

/// d(directional derivative)/d(params).
Mat mixed_derivative(const MlpNetwork& net, std::span<const double> x,
                     const NormalDirection& normal);

/// Accumulates into `grad` (length = params count) the reverse-mode product
///
///   grad += d/dtheta [ sum_c wv[c] * u_c(x) + sum_c wd[c] * (d_eta u)_c(x) ]
///
/// which is the single fused pass behind MSE, Lagrangian and penalty
/// gradients. `eta_padded` may be empty when all wd weights are zero, in
/// which case the tangent streams are skipped entirely.
void accumulate_weighted_grad(const MlpNetwork& net, std::span<const double> x,
                              std::span<const double> eta_padded,
                              std::span<const double> wv,
                              std::span<const double> wd, MlpWorkspace& ws,
                              double* grad);

}  // namespace ddnn
