#include "ddnn/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstring>

#include "ddnn/error.hpp"

namespace ddnn::kernels {

namespace {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int thread_id() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

inline int n_blocks(int n) { return (n + kBlock - 1) / kBlock; }

// One row of the MSE objective: accumulates the squared error into `loss`
// and the gradient of ||u_hat - u||^2 / n into `grad`.
void mse_row(const MlpNetwork& net, const double* x, const double* u, int n_out,
             double inv_n, MlpWorkspace& ws, VecD& wv, double& loss,
             double* grad) {
  VecD out;
  forward(net, {x, static_cast<std::size_t>(net.input_dim())}, ws, out);
  double e2 = 0.0;
  for (int c = 0; c < n_out; ++c) {
    const double e = out[c] - u[c];
    e2 += e * e;
    wv[c] = 2.0 * inv_n * e;
  }
  loss += e2;
  accumulate_weighted_grad(net, {x, static_cast<std::size_t>(net.input_dim())},
                           {}, wv, {}, ws, grad);
}

}  // namespace

double mse_and_grad_serial(const MlpNetwork& net, const double* X,
                           const double* U, int n, VecD& grad) {
  if (n <= 0) fail(ErrorCode::kEmptyData, "mse over empty dataset");
  const int n_in = net.input_dim();
  const int n_out = net.output_dim();
  grad.assign(net.params.size(), 0.0);
  MlpWorkspace ws;
  VecD wv(n_out);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int r = 0; r < n; ++r)
    mse_row(net, X + static_cast<std::size_t>(r) * n_in,
            U + static_cast<std::size_t>(r) * n_out, n_out, inv_n, ws, wv, loss,
            grad.data());
  return loss * inv_n;
}

double mse_and_grad(const MlpNetwork& net, const double* X, const double* U,
                    int n, VecD& grad) {
  if (n <= 0) fail(ErrorCode::kEmptyData, "mse over empty dataset");
  const int n_in = net.input_dim();
  const int n_out = net.output_dim();
  const int nb = n_blocks(n);
  const std::size_t np = net.params.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  Mat partial_grad(nb, static_cast<int>(np));
  VecD partial_loss(nb, 0.0);
  std::vector<MlpWorkspace> ws(max_threads());
  std::vector<VecD> wv(max_threads(), VecD(n_out));

#pragma omp parallel for schedule(static)
  for (int b = 0; b < nb; ++b) {
    const int tid = thread_id();
    const int r0 = b * kBlock;
    const int r1 = std::min(n, r0 + kBlock);
    double loss = 0.0;
    for (int r = r0; r < r1; ++r)
      mse_row(net, X + static_cast<std::size_t>(r) * n_in,
              U + static_cast<std::size_t>(r) * n_out, n_out, inv_n, ws[tid],
              wv[tid], loss, partial_grad.row(b));
    partial_loss[b] = loss;
  }

  grad.assign(np, 0.0);
  double loss = 0.0;
  for (int b = 0; b < nb; ++b) {
    loss += partial_loss[b];
    const double* pb = partial_grad.row(b);
    for (std::size_t i = 0; i < np; ++i) grad[i] += pb[i];
  }
  return loss * inv_n;
}

void values_and_normal_ders_serial(const MlpNetwork& net, const Mat& points,
                                   const VecD& eta_padded, Mat& values,
                                   Mat& derivs) {
  const int n = points.rows;
  const int n_out = net.output_dim();
  values = Mat(n, n_out);
  derivs = Mat(n, n_out);
  MlpWorkspace ws;
  VecD val, der;
  for (int r = 0; r < n; ++r) {
    forward_with_normal(net, points.row_span(r), eta_padded, ws, val, der);
    std::memcpy(values.row(r), val.data(), sizeof(double) * n_out);
    std::memcpy(derivs.row(r), der.data(), sizeof(double) * n_out);
  }
}

void values_and_normal_ders(const MlpNetwork& net, const Mat& points,
                            const VecD& eta_padded, Mat& values, Mat& derivs) {
  const int n = points.rows;
  const int n_out = net.output_dim();
  values = Mat(n, n_out);
  derivs = Mat(n, n_out);
  std::vector<MlpWorkspace> ws(max_threads());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) {
    const int tid = thread_id();
    VecD val, der;
    forward_with_normal(net, points.row_span(r), eta_padded, ws[tid], val, der);
    std::memcpy(values.row(r), val.data(), sizeof(double) * n_out);
    std::memcpy(derivs.row(r), der.data(), sizeof(double) * n_out);
  }
}

void weighted_vjp_sum_serial(const MlpNetwork& net, const Mat& points,
                             const VecD& eta_padded, const Mat& WV,
                             const Mat& WD, VecD& grad) {
  const int n = points.rows;
  MlpWorkspace ws;
  for (int r = 0; r < n; ++r)
    accumulate_weighted_grad(net, points.row_span(r), eta_padded, WV.row_span(r),
                             WD.empty() ? std::span<const double>{}
                                        : WD.row_span(r),
                             ws, grad.data());
}

void weighted_vjp_sum(const MlpNetwork& net, const Mat& points,
                      const VecD& eta_padded, const Mat& WV, const Mat& WD,
                      VecD& grad) {
  const int n = points.rows;
  const int nb = n_blocks(n);
  const std::size_t np = net.params.size();
  if (grad.size() != np)
    fail(ErrorCode::kShapeMismatch, "gradient accumulator has wrong length");

  Mat partial(nb, static_cast<int>(np));
  std::vector<MlpWorkspace> ws(max_threads());
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nb; ++b) {
    const int tid = thread_id();
    const int r0 = b * kBlock;
    const int r1 = std::min(n, r0 + kBlock);
    for (int r = r0; r < r1; ++r)
      accumulate_weighted_grad(net, points.row_span(r), eta_padded,
                               WV.row_span(r),
                               WD.empty() ? std::span<const double>{}
                                          : WD.row_span(r),
                               ws[tid], partial.row(b));
  }
  for (int b = 0; b < nb; ++b) {
    const double* pb = partial.row(b);
    for (std::size_t i = 0; i < np; ++i) grad[i] += pb[i];
  }
}

namespace {

void jacobian_point(const MlpNetwork& net, const Mat& points,
                    const VecD& eta_padded, int r, MlpWorkspace& ws, VecD& wv,
                    VecD& wd, Mat& jac) {
  const int n_out = net.output_dim();
  for (int c = 0; c < n_out; ++c) {
    wv[c] = 1.0;
    accumulate_weighted_grad(net, points.row_span(r), eta_padded, wv, wd, ws,
                             jac.row(2 * (r * n_out + c)));
    wv[c] = 0.0;
    wd[c] = 1.0;
    accumulate_weighted_grad(net, points.row_span(r), eta_padded, wv, wd, ws,
                             jac.row(2 * (r * n_out + c) + 1));
    wd[c] = 0.0;
  }
}

}  // namespace

void constraint_jacobian_serial(const MlpNetwork& net, const Mat& points,
                                const VecD& eta_padded, Mat& jac) {
  const int n = points.rows;
  const int n_out = net.output_dim();
  jac = Mat(2 * n * n_out, static_cast<int>(net.params.size()));
  MlpWorkspace ws;
  VecD wv(n_out, 0.0), wd(n_out, 0.0);
  for (int r = 0; r < n; ++r) jacobian_point(net, points, eta_padded, r, ws, wv, wd, jac);
}

void constraint_jacobian(const MlpNetwork& net, const Mat& points,
                         const VecD& eta_padded, Mat& jac) {
  const int n = points.rows;
  const int n_out = net.output_dim();
  jac = Mat(2 * n * n_out, static_cast<int>(net.params.size()));
  std::vector<MlpWorkspace> ws(max_threads());
  std::vector<VecD> wv(max_threads(), VecD(n_out, 0.0));
  std::vector<VecD> wd(max_threads(), VecD(n_out, 0.0));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) {
    const int tid = thread_id();
    jacobian_point(net, points, eta_padded, r, ws[tid], wv[tid], wd[tid], jac);
  }
}

}  // namespace ddnn::kernels
