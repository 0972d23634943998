#include "ddnn/mlp.hpp"

#include <cmath>
#include <string>

#include "ddnn/error.hpp"
#include "ddnn/rng.hpp"

namespace ddnn {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_widths(const std::vector<int>& widths) {
  if (widths.size() < 2)
    fail(ErrorCode::kInvalidArchitecture,
         "network needs at least an input and an output width");
  for (int w : widths)
    if (w < 1)
      fail(ErrorCode::kInvalidArchitecture,
           "layer width must be positive, got " + std::to_string(w));
}

inline double act(Activation a, double x) {
  return a == Activation::kSwish ? swish(x) : x;
}
inline double act_d1(Activation a, double x) {
  return a == Activation::kSwish ? swish_d1(x) : 1.0;
}
inline double act_d2(Activation a, double x) {
  return a == Activation::kSwish ? swish_d2(x) : 0.0;
}

void resize_ws(const MlpNetwork& net, MlpWorkspace& ws, bool tangent) {
  const int L = net.num_layers();
  ws.z.resize(L + 1);
  ws.h.resize(L + 1);
  for (int k = 0; k <= L; ++k) {
    ws.z[k].resize(net.layer_widths[k]);
    if (k >= 1) ws.h[k].resize(net.layer_widths[k]);
  }
  if (tangent) {
    ws.s.resize(L + 1);
    ws.t.resize(L + 1);
    for (int k = 0; k <= L; ++k) {
      ws.t[k].resize(net.layer_widths[k]);
      if (k >= 1) ws.s[k].resize(net.layer_widths[k]);
    }
  }
}

}  // namespace

double swish(double x) { return x * sigmoid(x); }

double swish_d1(double x) {
  const double s = sigmoid(x);
  return s + x * s * (1.0 - s);
}

double swish_d2(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s) * (2.0 + x * (1.0 - 2.0 * s));
}

std::size_t MlpNetwork::param_count(const std::vector<int>& widths) {
  check_widths(widths);
  std::size_t n = 0;
  for (std::size_t k = 1; k < widths.size(); ++k)
    n += static_cast<std::size_t>(widths[k - 1]) * widths[k] + widths[k];
  return n;
}

VecD init_params(const std::vector<int>& widths, std::uint64_t seed) {
  check_widths(widths);
  VecD params(MlpNetwork::param_count(widths));
  Rng rng(seed);
  std::size_t p = 0;
  for (std::size_t k = 1; k < widths.size(); ++k) {
    const int fan_in = widths[k - 1];
    const int fan_out = widths[k];
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (int i = 0; i < fan_out * fan_in; ++i) params[p++] = stddev * rng.next_normal();
    for (int i = 0; i < fan_out; ++i) params[p++] = 0.0;  // biases
  }
  return params;
}

MlpNetwork make_network(std::vector<int> widths, Activation act, std::uint64_t seed) {
  MlpNetwork net;
  net.layer_widths = std::move(widths);
  net.activation = act;
  net.params = init_params(net.layer_widths, seed);
  net.init_seed = seed;
  return net;
}

NormalDirection::NormalDirection(VecD d) : dir(std::move(d)) {
  double n2 = 0.0;
  for (double v : dir) n2 += v * v;
  if (std::fabs(std::sqrt(n2) - 1.0) > 1e-12)
    fail(ErrorCode::kShapeMismatch, "normal direction must have unit length");
}

VecD pad_normal(const NormalDirection& normal, int input_dim) {
  if (static_cast<int>(normal.dir.size()) > input_dim)
    fail(ErrorCode::kShapeMismatch, "normal has more components than network inputs");
  VecD eta(input_dim, 0.0);
  for (std::size_t i = 0; i < normal.dir.size(); ++i) eta[i] = normal.dir[i];
  return eta;
}

void forward(const MlpNetwork& net, std::span<const double> x, MlpWorkspace& ws,
             VecD& out) {
  if (static_cast<int>(x.size()) != net.input_dim())
    fail(ErrorCode::kShapeMismatch, "input length " + std::to_string(x.size()) +
                                        " does not match network input width " +
                                        std::to_string(net.input_dim()));
  resize_ws(net, ws, /*tangent=*/false);
  const int L = net.num_layers();
  for (std::size_t i = 0; i < x.size(); ++i) ws.z[0][i] = x[i];

  const double* p = net.params.data();
  for (int k = 1; k <= L; ++k) {
    const int m_in = net.layer_widths[k - 1];
    const int m_out = net.layer_widths[k];
    const double* W = p;
    const double* b = p + static_cast<std::size_t>(m_out) * m_in;
    const VecD& zin = ws.z[k - 1];
    for (int i = 0; i < m_out; ++i) {
      double acc = b[i];
      const double* wrow = W + static_cast<std::size_t>(i) * m_in;
      for (int j = 0; j < m_in; ++j) acc += wrow[j] * zin[j];
      ws.h[k][i] = acc;
      ws.z[k][i] = (k < L) ? act(net.activation, acc) : acc;
    }
    p = b + m_out;
  }
  out = ws.z[L];
}

VecD forward(const MlpNetwork& net, std::span<const double> x) {
  MlpWorkspace ws;
  VecD out;
  forward(net, x, ws, out);
  return out;
}

void forward_with_normal(const MlpNetwork& net, std::span<const double> x,
                         std::span<const double> eta_padded, MlpWorkspace& ws,
                         VecD& value, VecD& normal_der) {
  if (static_cast<int>(x.size()) != net.input_dim() ||
      static_cast<int>(eta_padded.size()) != net.input_dim())
    fail(ErrorCode::kShapeMismatch, "input/direction length mismatch");
  resize_ws(net, ws, /*tangent=*/true);
  const int L = net.num_layers();
  for (std::size_t i = 0; i < x.size(); ++i) {
    ws.z[0][i] = x[i];
    ws.t[0][i] = eta_padded[i];
  }

  const double* p = net.params.data();
  for (int k = 1; k <= L; ++k) {
    const int m_in = net.layer_widths[k - 1];
    const int m_out = net.layer_widths[k];
    const double* W = p;
    const double* b = p + static_cast<std::size_t>(m_out) * m_in;
    const VecD& zin = ws.z[k - 1];
    const VecD& tin = ws.t[k - 1];
    for (int i = 0; i < m_out; ++i) {
      const double* wrow = W + static_cast<std::size_t>(i) * m_in;
      double acc = b[i];
      double tac = 0.0;
      for (int j = 0; j < m_in; ++j) {
        acc += wrow[j] * zin[j];
        tac += wrow[j] * tin[j];
      }
      ws.h[k][i] = acc;
      ws.s[k][i] = tac;
      if (k < L) {
        ws.z[k][i] = act(net.activation, acc);
        ws.t[k][i] = act_d1(net.activation, acc) * tac;
      } else {
        ws.z[k][i] = acc;
        ws.t[k][i] = tac;
      }
    }
    p = b + m_out;
  }
  value = ws.z[L];
  normal_der = ws.t[L];
}

VecD normal_derivative(const MlpNetwork& net, std::span<const double> x,
                       const NormalDirection& normal) {
  MlpWorkspace ws;
  VecD value, der;
  const VecD eta = pad_normal(normal, net.input_dim());
  forward_with_normal(net, x, eta, ws, value, der);
  return der;
}

void accumulate_weighted_grad(const MlpNetwork& net, std::span<const double> x,
                              std::span<const double> eta_padded,
                              std::span<const double> wv,
                              std::span<const double> wd, MlpWorkspace& ws,
                              double* grad) {
  const bool tangent = !wd.empty();
  const int L = net.num_layers();
  const int n_out = net.output_dim();
  if (static_cast<int>(wv.size()) != n_out ||
      (tangent && static_cast<int>(wd.size()) != n_out))
    fail(ErrorCode::kShapeMismatch, "weight vector length mismatch");

  VecD out_value, out_der;
  if (tangent) {
    forward_with_normal(net, x, eta_padded, ws, out_value, out_der);
  } else {
    forward(net, x, ws, out_value);
  }

  ws.bh.resize(L + 1);
  if (tangent) ws.bs.resize(L + 1);
  for (int k = 1; k <= L; ++k) {
    ws.bh[k].assign(net.layer_widths[k], 0.0);
    if (tangent) ws.bs[k].assign(net.layer_widths[k], 0.0);
  }
  // Output layer is affine: z[L] = h[L], t[L] = s[L].
  for (int i = 0; i < n_out; ++i) {
    ws.bh[L][i] = wv[i];
    if (tangent) ws.bs[L][i] = wd[i];
  }

  // Walk layer offsets once so the reverse sweep can index W/b blocks.
  std::vector<std::size_t> offset(L + 1);
  {
    std::size_t p = 0;
    for (int k = 1; k <= L; ++k) {
      offset[k] = p;
      p += static_cast<std::size_t>(net.layer_widths[k - 1]) * net.layer_widths[k] +
           net.layer_widths[k];
    }
  }

  for (int k = L; k >= 1; --k) {
    const int m_in = net.layer_widths[k - 1];
    const int m_out = net.layer_widths[k];
    const double* W = net.params.data() + offset[k];
    double* gW = grad + offset[k];
    double* gb = gW + static_cast<std::size_t>(m_out) * m_in;
    const VecD& zin = ws.z[k - 1];
    const VecD& bhk = ws.bh[k];

    ws.bz.assign(m_in, 0.0);
    if (tangent) ws.bt.assign(m_in, 0.0);

    for (int i = 0; i < m_out; ++i) {
      const double bhi = bhk[i];
      const double bsi = tangent ? ws.bs[k][i] : 0.0;
      const double* wrow = W + static_cast<std::size_t>(i) * m_in;
      double* grow = gW + static_cast<std::size_t>(i) * m_in;
      gb[i] += bhi;
      if (tangent) {
        const VecD& tin = ws.t[k - 1];
        for (int j = 0; j < m_in; ++j) {
          grow[j] += bhi * zin[j] + bsi * tin[j];
          ws.bz[j] += wrow[j] * bhi;
          ws.bt[j] += wrow[j] * bsi;
        }
      } else {
        for (int j = 0; j < m_in; ++j) {
          grow[j] += bhi * zin[j];
          ws.bz[j] += wrow[j] * bhi;
        }
      }
    }

    if (k > 1) {
      // Through the hidden activation of layer k-1:
      //   z = a(h),  t = a'(h) .* s
      for (int j = 0; j < m_in; ++j) {
        const double hj = ws.h[k - 1][j];
        const double d1 = act_d1(net.activation, hj);
        if (tangent) {
          const double d2 = act_d2(net.activation, hj);
          ws.bh[k - 1][j] = ws.bz[j] * d1 + ws.bt[j] * d2 * ws.s[k - 1][j];
          ws.bs[k - 1][j] = ws.bt[j] * d1;
        } else {
          ws.bh[k - 1][j] = ws.bz[j] * d1;
        }
      }
    }
  }
}

Mat grad_params(const MlpNetwork& net, std::span<const double> x) {
  const int n_out = net.output_dim();
  Mat jac(n_out, static_cast<int>(net.params.size()));
  MlpWorkspace ws;
  VecD wv(n_out, 0.0);
  for (int c = 0; c < n_out; ++c) {
    wv[c] = 1.0;
    accumulate_weighted_grad(net, x, {}, wv, {}, ws, jac.row(c));
    wv[c] = 0.0;
  }
  return jac;
}

Mat mixed_derivative(const MlpNetwork& net, std::span<const double> x,
                     const NormalDirection& normal) {
  const int n_out = net.output_dim();
  Mat jac(n_out, static_cast<int>(net.params.size()));
  MlpWorkspace ws;
  const VecD eta = pad_normal(normal, net.input_dim());
  VecD wv(n_out, 0.0), wd(n_out, 0.0);
  for (int c = 0; c < n_out; ++c) {
    wd[c] = 1.0;
    accumulate_weighted_grad(net, x, eta, wv, wd, ws, jac.row(c));
    wd[c] = 0.0;
  }
  return jac;
}

}  // namespace ddnn
