#include "ddnn/objectives.hpp"

#include <string>

#include "ddnn/error.hpp"
#include "ddnn/kernels.hpp"

namespace ddnn {

namespace {

void check_segment(const MlpNetwork& net, const ConstraintContext::Segment& seg) {
  if (seg.points.cols != net.input_dim())
    fail(ErrorCode::kShapeMismatch, "constraint points do not match network inputs");
  if (seg.ref_values.rows != seg.points.rows || seg.ref_derivs.rows != seg.points.rows ||
      seg.ref_values.cols != net.output_dim() || seg.ref_derivs.cols != net.output_dim())
    fail(ErrorCode::kInconsistentInterface,
         "interface predictions missing or mis-shaped for interface " +
             std::to_string(seg.interface_id));
}

}  // namespace

int ConstraintContext::entry_count() const {
  int n = 0;
  for (const auto& seg : segments) n += 2 * seg.points.rows * seg.ref_values.cols;
  return n;
}

VecD constraint_residual(const MlpNetwork& net, const ConstraintContext& ctx) {
  VecD q;
  q.reserve(ctx.entry_count());
  Mat vals, ders;
  for (const auto& seg : ctx.segments) {
    check_segment(net, seg);
    kernels::values_and_normal_ders(net, seg.points, seg.eta, vals, ders);
    const int n_out = net.output_dim();
    for (int p = 0; p < seg.points.rows; ++p)
      for (int c = 0; c < n_out; ++c) {
        q.push_back(vals(p, c) - seg.ref_values(p, c));
        q.push_back(ders(p, c) - seg.ref_derivs(p, c));
      }
  }
  return q;
}

double mse_loss(const MlpNetwork& net, const Mat& X, const Mat& U, VecD& grad) {
  if (X.rows == 0) fail(ErrorCode::kEmptyData, "mse over an empty dataset");
  return kernels::mse_and_grad(net, X.a.data(), U.a.data(), X.rows, grad);
}

namespace {

/// value += lambda^T Q (+ rho ||Q||^2), grad += J_Q^T (lambda + 2 rho Q),
/// accumulated segment by segment without materializing J_Q.
double constraint_terms(const MlpNetwork& net, const VecD& lambda, double rho,
                        const ConstraintContext& ctx, VecD& grad) {
  const int n_out = net.output_dim();
  double value = 0.0;
  int e = 0;
  Mat vals, ders;
  for (const auto& seg : ctx.segments) {
    check_segment(net, seg);
    kernels::values_and_normal_ders(net, seg.points, seg.eta, vals, ders);
    Mat WV(seg.points.rows, n_out), WD(seg.points.rows, n_out);
    for (int p = 0; p < seg.points.rows; ++p)
      for (int c = 0; c < n_out; ++c) {
        const double qv = vals(p, c) - seg.ref_values(p, c);
        const double qd = ders(p, c) - seg.ref_derivs(p, c);
        const double lv = lambda[e];
        const double ld = lambda[e + 1];
        value += lv * qv + ld * qd + rho * (qv * qv + qd * qd);
        WV(p, c) = lv + 2.0 * rho * qv;
        WD(p, c) = ld + 2.0 * rho * qd;
        e += 2;
      }
    kernels::weighted_vjp_sum(net, seg.points, seg.eta, WV, WD, grad);
  }
  return value;
}

void check_lambda(const VecD& lambda, const ConstraintContext& ctx) {
  if (static_cast<int>(lambda.size()) != ctx.entry_count())
    fail(ErrorCode::kShapeMismatch,
         "multiplier length " + std::to_string(lambda.size()) +
             " does not match constraint entries " +
             std::to_string(ctx.entry_count()));
}

}  // namespace

double lagrangian(const MlpNetwork& net, const VecD& lambda, const Mat& X,
                  const Mat& U, const ConstraintContext& ctx, VecD& grad) {
  check_lambda(lambda, ctx);
  const double j = mse_loss(net, X, U, grad);
  return j + constraint_terms(net, lambda, 0.0, ctx, grad);
}

double augmented_lagrangian(const MlpNetwork& net, const VecD& lambda,
                            double rho, const Mat& X, const Mat& U,
                            const ConstraintContext& ctx, VecD& grad) {
  if (rho <= 0.0) fail(ErrorCode::kInvalidConfig, "penalty rho must be positive");
  check_lambda(lambda, ctx);
  const double j = mse_loss(net, X, U, grad);
  return j + constraint_terms(net, lambda, rho, ctx, grad);
}

VecD LinearizedConstraint::evaluate(const VecD& theta) const {
  VecD q = q_ref;
  for (int r = 0; r < jac.rows; ++r) {
    const double* row = jac.row(r);
    double acc = 0.0;
    for (int c = 0; c < jac.cols; ++c) acc += row[c] * (theta[c] - theta_ref[c]);
    q[r] += acc;
  }
  return q;
}

LinearizedConstraint linearize_constraints(const MlpNetwork& net,
                                           const VecD& theta_ref,
                                           const ConstraintContext& ctx) {
  if (theta_ref.size() != net.params.size())
    fail(ErrorCode::kShapeMismatch, "reference parameters have wrong length");
  MlpNetwork ref = net;
  ref.params = theta_ref;

  LinearizedConstraint lin;
  lin.theta_ref = theta_ref;
  lin.q_ref = constraint_residual(ref, ctx);
  lin.jac = Mat(ctx.entry_count(), static_cast<int>(theta_ref.size()));
  int row0 = 0;
  Mat seg_jac;
  for (const auto& seg : ctx.segments) {
    kernels::constraint_jacobian(ref, seg.points, seg.eta, seg_jac);
    for (int r = 0; r < seg_jac.rows; ++r)
      for (int c = 0; c < seg_jac.cols; ++c) lin.jac(row0 + r, c) = seg_jac(r, c);
    row0 += seg_jac.rows;
  }
  if (!all_finite(lin.jac.a) || !all_finite(lin.q_ref))
    fail(ErrorCode::kNumericalFailure, "non-finite constraint linearization");
  return lin;
}

double linearized_lagrangian(const MlpNetwork& net, const VecD& lambda,
                             const Mat& X, const Mat& U,
                             const LinearizedConstraint& lin, VecD& grad) {
  if (lambda.size() != lin.q_ref.size())
    fail(ErrorCode::kShapeMismatch, "multiplier length does not match linearization");
  const double j = mse_loss(net, X, U, grad);
  const VecD q_bar = lin.evaluate(net.params);
  double value = j;
  for (std::size_t e = 0; e < lambda.size(); ++e) value += lambda[e] * q_bar[e];
  // frozen-Jacobian dual shift: grad += J_Q(theta_ref)^T lambda
  for (int r = 0; r < lin.jac.rows; ++r) {
    const double lr = lambda[r];
    if (lr == 0.0) continue;
    const double* row = lin.jac.row(r);
    for (int c = 0; c < lin.jac.cols; ++c) grad[c] += lr * row[c];
  }
  return value;
}

double interface_loss(const MlpNetwork& iface_net, const Mat& points,
                      const VecD& eta, const Mat& left_values,
                      const Mat& left_derivs, const Mat& right_values,
                      const Mat& right_derivs, VecD& grad) {
  const int n = points.rows;
  if (n < 2)
    fail(ErrorCode::kInvalidInterface,
         "interface needs at least 2 collocation points");
  const int n_out = iface_net.output_dim();

  Mat vals, ders;
  kernels::values_and_normal_ders(iface_net, points, eta, vals, ders);

  double loss = 0.0;
  Mat WV(n, n_out), WD(n, n_out);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int p = 0; p < n; ++p)
    for (int c = 0; c < n_out; ++c) {
      const double ev_l = vals(p, c) - left_values(p, c);
      const double ev_r = vals(p, c) - right_values(p, c);
      const double ed_l = ders(p, c) - left_derivs(p, c);
      const double ed_r = ders(p, c) - right_derivs(p, c);
      loss += inv_n * (ev_l * ev_l + ev_r * ev_r + ed_l * ed_l + ed_r * ed_r);
      WV(p, c) = 2.0 * inv_n * (ev_l + ev_r);
      WD(p, c) = 2.0 * inv_n * (ed_l + ed_r);
    }
  grad.assign(iface_net.params.size(), 0.0);
  kernels::weighted_vjp_sum(iface_net, points, eta, WV, WD, grad);
  return loss;
}

}  // namespace ddnn
