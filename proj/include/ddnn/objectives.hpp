#pragma once

#include <vector>

#include "ddnn/mat.hpp"
#include "ddnn/mlp.hpp"

namespace ddnn {

/// Frozen interface data one subdomain is constrained against, covering all
/// of its adjacent interfaces. Evaluation points are the collocation points,
/// replicated per parameter sample for parametric problems (sample-major).
///
/// Constraint entries are ordered segment-major, then evaluation point, then
/// output component, then {value, normal derivative}; the sign convention is
/// local minus interface.
struct ConstraintContext {
  struct Segment {
    int interface_id = -1;
    Mat points;      // n_eval x input_dim
    VecD eta;        // direction, padded to input_dim
    Mat ref_values;  // n_eval x out, frozen interface predictions
    Mat ref_derivs;  // n_eval x out
  };
  std::vector<Segment> segments;

  int entry_count() const;
  bool empty() const { return segments.empty(); }
};

/// Q_i(theta): stacked value / normal-derivative mismatches.
VecD constraint_residual(const MlpNetwork& net, const ConstraintContext& ctx);

/// J = mean_r ||u_hat(X_r) - U_r||^2 with analytic gradient.
double mse_loss(const MlpNetwork& net, const Mat& X, const Mat& U, VecD& grad);

/// L = J + lambda^T Q, gradient = grad J + J_Q^T lambda (exact Jacobian,
/// accumulated matrix-free).
double lagrangian(const MlpNetwork& net, const VecD& lambda, const Mat& X,
                  const Mat& U, const ConstraintContext& ctx, VecD& grad);

/// L = J + lambda^T Q + rho ||Q||^2 (raw sum of squares).
double augmented_lagrangian(const MlpNetwork& net, const VecD& lambda,
                            double rho, const Mat& X, const Mat& U,
                            const ConstraintContext& ctx, VecD& grad);

/// First-order model of Q around theta_ref:
///   Q_bar(theta) = Q(theta_ref) + J_Q(theta_ref) (theta - theta_ref)
struct LinearizedConstraint {
  VecD theta_ref;
  VecD q_ref;
  Mat jac;  // entry_count x n_params

  VecD evaluate(const VecD& theta) const;
};

LinearizedConstraint linearize_constraints(const MlpNetwork& net,
                                           const VecD& theta_ref,
                                           const ConstraintContext& ctx);

/// L_bar = J(theta) + lambda^T Q_bar(theta); the Jacobian stays frozen at
/// theta_ref, so the dual term is a constant gradient shift.
double linearized_lagrangian(const MlpNetwork& net, const VecD& lambda,
                             const Mat& X, const Mat& U,
                             const LinearizedConstraint& lin, VecD& grad);

/// Interface objective: the interface net against both frozen neighbours,
///   J_ij = sum_{side} mean_p ||u_hat - side_values||^2
///        + sum_{side} mean_p ||d_eta u_hat - side_derivs||^2
/// with gradient w.r.t. the interface parameters.
double interface_loss(const MlpNetwork& iface_net, const Mat& points,
                      const VecD& eta, const Mat& left_values,
                      const Mat& left_derivs, const Mat& right_values,
                      const Mat& right_derivs, VecD& grad);

}  // namespace ddnn
