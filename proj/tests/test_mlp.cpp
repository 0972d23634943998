#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ddnn/error.hpp"
#include "ddnn/mlp.hpp"
#include "ddnn/rng.hpp"
#include "test_util.hpp"

using namespace ddnn;
using testutil::fd_gradient;
using testutil::max_rel_dev;

namespace {

// Independent straightforward re-implementation of the layer composition,
// kept deliberately naive as an oracle for forward().
VecD naive_forward(const MlpNetwork& net, const VecD& x) {
  VecD z = x;
  std::size_t p = 0;
  const int L = net.num_layers();
  for (int k = 1; k <= L; ++k) {
    const int m_in = net.layer_widths[k - 1];
    const int m_out = net.layer_widths[k];
    VecD h(m_out);
    for (int i = 0; i < m_out; ++i) {
      double acc = 0.0;
      for (int j = 0; j < m_in; ++j) acc += net.params[p + i * m_in + j] * z[j];
      h[i] = acc + net.params[p + m_out * m_in + i];
    }
    p += static_cast<std::size_t>(m_out) * m_in + m_out;
    if (k < L)
      for (auto& v : h) v = v / (1.0 + std::exp(-v));
    z = std::move(h);
  }
  return z;
}

VecD random_input(int dim, Rng& rng) {
  VecD x(dim);
  for (auto& v : x) v = 2.0 * rng.next_uniform() - 1.0;
  return x;
}

}  // namespace

TEST_CASE("parameter count formula") {
  CHECK(MlpNetwork::param_count({2, 40, 40, 1}) == 1801);
  CHECK(MlpNetwork::param_count({1, 1}) == 2);

  // Property: matches the hand formula for random width lists.
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_layers = 2 + static_cast<int>(rng.next_u64() % 4);
    std::vector<int> widths(n_layers);
    for (auto& w : widths) w = 1 + static_cast<int>(rng.next_u64() % 12);
    std::size_t expect = 0;
    for (std::size_t k = 1; k < widths.size(); ++k)
      expect += static_cast<std::size_t>(widths[k - 1]) * widths[k] + widths[k];
    CHECK(MlpNetwork::param_count(widths) == expect);
    CHECK(init_params(widths, 123).size() == expect);
  }
}

TEST_CASE("init rejects bad architectures") {
  CHECK_THROWS_AS(init_params({}, 1), Error);
  CHECK_THROWS_AS(init_params({3}, 1), Error);
  CHECK_THROWS_AS(init_params({2, 0, 1}, 1), Error);
}

TEST_CASE("init is deterministic, biases zero") {
  const VecD a = init_params({1, 1}, 42);
  const VecD b = init_params({1, 1}, 42);
  CHECK(a == b);
  CHECK(a.size() == 2);
  CHECK(a[1] == 0.0);  // bias exactly zero

  const VecD c = init_params({2, 40, 40, 1}, 9);
  // biases of the first layer sit right after the 2*40 weights
  for (int i = 0; i < 40; ++i) CHECK(c[80 + i] == 0.0);
}

TEST_CASE("He normal weight scale") {
  // Pool first-layer weights of widths [2,40,1] nets until 1e5 draws;
  // sample std must be within 5% of sqrt(2/2) = 1.
  double sum = 0.0, sum2 = 0.0;
  long n = 0;
  for (std::uint64_t seed = 0; seed < 1250; ++seed) {
    const VecD p = init_params({2, 40, 1}, Rng::mix(5, 1, seed));
    for (int i = 0; i < 80; ++i) {
      sum += p[i];
      sum2 += p[i] * p[i];
      ++n;
    }
  }
  const double mean = sum / n;
  const double stddev = std::sqrt(sum2 / n - mean * mean);
  CHECK(n == 100000);
  CHECK(std::fabs(stddev - 1.0) < 0.05);
  CHECK(std::fabs(mean) < 0.02);
}

TEST_CASE("swish values") {
  CHECK(swish(0.0) == 0.0);
  CHECK(std::fabs(swish(20.0) - 20.0) < 1e-7);
  CHECK(std::fabs(swish(-20.0)) < 1e-7);
  CHECK(swish(-20.0) == doctest::Approx(-4.122e-8).epsilon(0.01));
}

TEST_CASE("swish smoothness: first-order expansion error is O(h^2)") {
  for (double x : {-2.0, -0.3, 0.0, 0.7, 3.1}) {
    double prev = -1.0;
    for (double h : {1e-2, 1e-3, 1e-4}) {
      const double err = std::fabs(swish(x + h) - swish(x) - h * swish_d1(x));
      CHECK(err < 2.0 * h * h);
      if (prev > 0.0) CHECK(err < prev);
      prev = err;
    }
  }
}

TEST_CASE("forward: zero weights collapse to final bias") {
  MlpNetwork net;
  net.layer_widths = {2, 5, 3};
  net.params.assign(MlpNetwork::param_count(net.layer_widths), 0.0);
  // final biases are the last 3 entries
  const std::size_t nb = net.params.size();
  net.params[nb - 3] = 1.5;
  net.params[nb - 2] = -0.25;
  net.params[nb - 1] = 4.0;
  for (double x0 : {-1.0, 0.0, 2.0}) {
    const VecD out = forward(net, VecD{x0, 0.5});
    CHECK(out[0] == 1.5);
    CHECK(out[1] == -0.25);
    CHECK(out[2] == 4.0);
  }
}

TEST_CASE("forward: single affine layer is the identity map") {
  MlpNetwork net;
  net.layer_widths = {2, 2};
  net.params = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0};  // W = I, b = 0
  const VecD out = forward(net, VecD{0.3, -0.8});
  CHECK(out[0] == 0.3);
  CHECK(out[1] == -0.8);
}

TEST_CASE("forward matches naive re-implementation") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const MlpNetwork net = make_network({3, 7, 5, 2}, Activation::kSwish,
                                        Rng::mix(2, 3, trial));
    const VecD x = random_input(3, rng);
    const VecD a = forward(net, x);
    const VecD b = naive_forward(net, x);
    for (int c = 0; c < 2; ++c) CHECK(a[c] == doctest::Approx(b[c]).epsilon(1e-12));
  }
}

TEST_CASE("forward rejects dimension mismatch") {
  const MlpNetwork net = make_network({3, 4, 1}, Activation::kSwish, 1);
  CHECK_THROWS_AS(forward(net, VecD{1.0, 2.0}), Error);
}

TEST_CASE("forward is positively linear in the final layer") {
  MlpNetwork net = make_network({2, 6, 6, 2}, Activation::kSwish, 77);
  const VecD x{0.4, -0.9};
  const VecD base = forward(net, x);
  // scale final W and b by c
  const double c = 3.5;
  const std::size_t last = static_cast<std::size_t>(6) * 2 + 2;
  for (std::size_t i = net.params.size() - last; i < net.params.size(); ++i)
    net.params[i] *= c;
  const VecD scaled = forward(net, x);
  for (int i = 0; i < 2; ++i) CHECK(scaled[i] == base[i] * c);
}

TEST_CASE("grad_params on a 1-1 linear model") {
  MlpNetwork net;
  net.layer_widths = {1, 1};
  net.params = {2.0, 0.5};  // u = 2x + 0.5
  const Mat jac = grad_params(net, VecD{3.0});
  CHECK(jac(0, 0) == 3.0);  // du/dw = x
  CHECK(jac(0, 1) == 1.0);  // du/db = 1
}

TEST_CASE("grad_params with zero signal") {
  MlpNetwork net;
  net.layer_widths = {2, 4, 1};
  net.params.assign(MlpNetwork::param_count(net.layer_widths), 0.0);
  const Mat jac = grad_params(net, VecD{0.0, 0.0});
  // final bias sensitivity is 1
  CHECK(jac(0, static_cast<int>(net.params.size()) - 1) == 1.0);
  // weights fed by zero activations contribute nothing
  for (int j = 0; j < 2 * 4; ++j) CHECK(jac(0, j) == 0.0);
  // final-layer weights see swish(0) = 0 activations
  for (int j = 0; j < 4; ++j)
    CHECK(jac(0, 2 * 4 + 4 + j) == 0.0);
}

TEST_CASE("grad_params matches finite differences") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const MlpNetwork net =
        make_network({2, 6, 4, 2}, Activation::kSwish, Rng::mix(4, 5, trial));
    const VecD x = random_input(2, rng);
    const Mat jac = grad_params(net, x);
    for (int c = 0; c < 2; ++c) {
      const VecD fd = fd_gradient(
          [&](const VecD& theta) {
            MlpNetwork m = net;
            m.params = theta;
            return forward(m, x)[c];
          },
          net.params);
      VecD row(jac.row(c), jac.row(c) + jac.cols);
      CHECK(max_rel_dev(row, fd) < 1e-5);
    }
  }
}

TEST_CASE("normal_derivative: linear map and constant net") {
  MlpNetwork net;
  net.layer_widths = {2, 2};
  net.params = {1.0, 2.0, 3.0, 4.0, 0.1, 0.2};  // W = [[1,2],[3,4]]
  const NormalDirection eta(VecD{0.0, 1.0});
  const VecD d = normal_derivative(net, VecD{0.7, -0.3}, eta);
  CHECK(d[0] == 2.0);  // W eta
  CHECK(d[1] == 4.0);

  MlpNetwork zero;
  zero.layer_widths = {2, 3, 1};
  zero.params.assign(MlpNetwork::param_count(zero.layer_widths), 0.0);
  const VecD dz = normal_derivative(zero, VecD{0.2, 0.2}, eta);
  CHECK(dz[0] == 0.0);
}

TEST_CASE("normal_derivative matches finite differences") {
  Rng rng(31);
  const double h = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    const MlpNetwork net =
        make_network({2, 8, 6, 2}, Activation::kSwish, Rng::mix(6, 7, trial));
    const VecD x = random_input(2, rng);
    const double a = 2.0 * rng.next_uniform() - 1.0;
    const NormalDirection eta(VecD{std::cos(a), std::sin(a)});
    const VecD der = normal_derivative(net, x, eta);
    VecD xp = x, xm = x;
    for (int i = 0; i < 2; ++i) {
      xp[i] += h * eta.dir[i];
      xm[i] -= h * eta.dir[i];
    }
    const VecD up = forward(net, xp);
    const VecD um = forward(net, xm);
    VecD fd(2);
    for (int c = 0; c < 2; ++c) fd[c] = (up[c] - um[c]) / (2.0 * h);
    CHECK(max_rel_dev(der, fd) < 1e-5);
  }
}

TEST_CASE("normal direction validates unit length") {
  CHECK_THROWS_AS(NormalDirection(VecD{0.0, 0.0}), Error);
  CHECK_THROWS_AS(NormalDirection(VecD{1.0, 1.0}), Error);
  CHECK_NOTHROW(NormalDirection(VecD{0.0, 1.0}));
}

TEST_CASE("mixed_derivative on a single affine layer") {
  MlpNetwork net;
  net.layer_widths = {2, 1};
  net.params = {1.5, -2.0, 0.7};  // u = 1.5 x1 - 2 x2 + 0.7
  const NormalDirection eta(VecD{0.6, 0.8});
  const Mat jac = mixed_derivative(net, VecD{0.1, 0.2}, eta);
  CHECK(jac(0, 0) == 0.6);  // d(d_eta u)/dW = eta
  CHECK(jac(0, 1) == 0.8);
  CHECK(jac(0, 2) == 0.0);  // bias plays no role in the derivative
}

TEST_CASE("mixed_derivative of a constant net is zero") {
  MlpNetwork zero;
  zero.layer_widths = {2, 3, 2};
  zero.params.assign(MlpNetwork::param_count(zero.layer_widths), 0.0);
  const NormalDirection eta(VecD{1.0, 0.0});
  const Mat jac = mixed_derivative(zero, VecD{0.3, 0.4}, eta);
  // With zero weights the tangent signal dies at the first layer, so only
  // first-layer weight entries can be nonzero; and those see t = eta but a
  // zero adjoint path... everything downstream of a zero W is zero except
  // the first-layer sensitivities reached through final-layer weights,
  // which are themselves zero.
  for (int c = 0; c < jac.rows; ++c)
    for (int j = 0; j < jac.cols; ++j) CHECK(jac(c, j) == 0.0);
}

TEST_CASE("mixed_derivative matches finite differences over parameters") {
  Rng rng(41);
  for (int trial = 0; trial < 4; ++trial) {
    const MlpNetwork net =
        make_network({2, 7, 5, 2}, Activation::kSwish, Rng::mix(8, 9, trial));
    const VecD x = random_input(2, rng);
    const NormalDirection eta(VecD{1.0, 0.0});
    const Mat jac = mixed_derivative(net, x, eta);
    for (int c = 0; c < 2; ++c) {
      const VecD fd = fd_gradient(
          [&](const VecD& theta) {
            MlpNetwork m = net;
            m.params = theta;
            return normal_derivative(m, x, eta)[c];
          },
          net.params);
      VecD row(jac.row(c), jac.row(c) + jac.cols);
      CHECK(max_rel_dev(row, fd) < 1e-4);
    }
  }
}
