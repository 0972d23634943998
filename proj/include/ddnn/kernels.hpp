#pragma once

#include "ddnn/mat.hpp"
#include "ddnn/mlp.hpp"

namespace ddnn::kernels {

/// Fixed accumulation block size for parallel reductions. Per-block partial
/// sums are combined in block order, so results are bit-identical for any
/// number of OpenMP threads (and match across repeated runs).
inline constexpr int kBlock = 64;

/// J = (1/n) sum_r ||u_hat(X_r) - U_r||^2 and its parameter gradient.
/// X: n x in (row-major), U: n x out. `grad` is resized and overwritten.
double mse_and_grad(const MlpNetwork& net, const double* X, const double* U,
                    int n, VecD& grad);
double mse_and_grad_serial(const MlpNetwork& net, const double* X,
                           const double* U, int n, VecD& grad);

/// Network values (and directional derivatives along `eta_padded`) at a batch
/// of points. `values` / `derivs` are n x out, resized and overwritten.
void values_and_normal_ders(const MlpNetwork& net, const Mat& points,
                            const VecD& eta_padded, Mat& values, Mat& derivs);
void values_and_normal_ders_serial(const MlpNetwork& net, const Mat& points,
                                   const VecD& eta_padded, Mat& values,
                                   Mat& derivs);

/// grad += sum_r d/dtheta [ sum_c WV(r,c) u_c(X_r) + sum_c WD(r,c) (d_eta u)_c(X_r) ]
/// WD may be empty (value-only weighting). `grad` must be pre-sized.
void weighted_vjp_sum(const MlpNetwork& net, const Mat& points,
                      const VecD& eta_padded, const Mat& WV, const Mat& WD,
                      VecD& grad);
void weighted_vjp_sum_serial(const MlpNetwork& net, const Mat& points,
                             const VecD& eta_padded, const Mat& WV,
                             const Mat& WD, VecD& grad);

/// Constraint Jacobian rows for a batch of points: for each point p and
/// output component c, row 2*(p*out + c) holds d(u_c)/dtheta and row
/// 2*(p*out + c) + 1 holds d((d_eta u)_c)/dtheta.
void constraint_jacobian(const MlpNetwork& net, const Mat& points,
                         const VecD& eta_padded, Mat& jac);
void constraint_jacobian_serial(const MlpNetwork& net, const Mat& points,
                                const VecD& eta_padded, Mat& jac);

}  // namespace ddnn::kernels
