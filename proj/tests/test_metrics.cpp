#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ddnn/error.hpp"
#include "ddnn/metrics.hpp"
#include "ddnn/rng.hpp"

using namespace ddnn;

TEST_CASE("relative error formula") {
  CHECK(relative_error(VecD{0.5}, VecD{0.5}) == 0.0);
  CHECK(relative_error(VecD{0.5}, VecD{0.0}) == 0.5);
  CHECK(relative_error(VecD{-1.0}, VecD{1.0}) == 1.0);
  // vector outputs reduce by max over components
  CHECK(relative_error(VecD{0.5, 0.0}, VecD{0.0, 0.0}) == 0.5);
}

TEST_CASE("relative error is invariant under simultaneous sign flip") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double p = 2.0 * rng.next_uniform() - 1.0;
    const double t = 2.0 * rng.next_uniform() - 1.0;
    CHECK(relative_error(VecD{p}, VecD{t}) == relative_error(VecD{-p}, VecD{-t}));
  }
}

TEST_CASE("field statistics with the 1/N estimator") {
  // two samples {0, 2} at one point: mean 1, std 1
  Mat X(2, 2), V(2, 1);
  X(0, 0) = 0.5;
  X(0, 1) = 0.5;
  X(1, 0) = 0.5;
  X(1, 1) = 0.5;
  V(0, 0) = 0.0;
  V(1, 0) = 2.0;
  const FieldStats st = field_statistics(X, 2, V);
  REQUIRE(st.points.rows == 1);
  CHECK(st.mean(0, 0) == 1.0);
  CHECK(st.stddev(0, 0) == 1.0);

  // constant samples: std 0
  V(1, 0) = 0.0;
  const FieldStats st2 = field_statistics(X, 2, V);
  CHECK(st2.stddev(0, 0) == 0.0);

  CHECK_THROWS_AS(field_statistics(Mat(0, 2), 2, Mat(0, 1)), Error);
}

TEST_CASE("field statistics match an independent two-pass computation") {
  Rng rng(11);
  const int n_pts = 7, n_samples = 13;
  Mat X(n_pts * n_samples, 2), V(n_pts * n_samples, 2);
  for (int s = 0; s < n_samples; ++s)
    for (int p = 0; p < n_pts; ++p) {
      const int r = s * n_pts + p;
      X(r, 0) = p * 0.125;
      X(r, 1) = -p * 0.25;
      V(r, 0) = rng.next_normal();
      V(r, 1) = rng.next_normal();
    }
  const FieldStats st = field_statistics(X, 2, V);
  REQUIRE(st.points.rows == n_pts);
  for (int p = 0; p < n_pts; ++p)
    for (int c = 0; c < 2; ++c) {
      double mean = 0.0;
      for (int s = 0; s < n_samples; ++s) mean += V(s * n_pts + p, c);
      mean /= n_samples;
      double var = 0.0;
      for (int s = 0; s < n_samples; ++s) {
        const double d = V(s * n_pts + p, c) - mean;
        var += d * d;
      }
      var /= n_samples;
      CHECK(st.mean(p, c) == doctest::Approx(mean).epsilon(1e-12));
      CHECK(st.stddev(p, c) == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
    }
}

namespace {

Dataset tiny_dataset(int n) {
  Dataset ds;
  ds.spatial_dim = 2;
  ds.out_dim = 1;
  ds.X = Mat(n, 2);
  ds.U = Mat(n, 1);
  Rng rng(5);
  for (int r = 0; r < n; ++r) {
    ds.X(r, 0) = rng.next_uniform();
    ds.X(r, 1) = rng.next_uniform();
    ds.U(r, 0) = 2.0 * rng.next_uniform() - 1.0;
  }
  return ds;
}

}  // namespace

TEST_CASE("max relative error equals a brute-force scan") {
  const Dataset ds = tiny_dataset(57);
  const Predictor pred = [](std::span<const double> x) {
    return VecD{0.3 * x[0] - 0.2 * x[1]};
  };
  const MaxRelError got = max_relative_error(pred, ds);

  double best = -1.0;
  int best_row = -1;
  for (int r = 0; r < ds.rows(); ++r) {
    const double e = std::fabs(pred(ds.X.row_span(r))[0] - ds.U(r, 0)) /
                     (std::fabs(ds.U(r, 0)) + 1.0);
    if (e > best) {
      best = e;
      best_row = r;
    }
  }
  CHECK(got.value == best);
  CHECK(got.row == best_row);
  CHECK(got.point[0] == ds.X(best_row, 0));

  // perfect model: zero
  const Predictor exact = [&](std::span<const double> x) {
    for (int r = 0; r < ds.rows(); ++r)
      if (ds.X(r, 0) == x[0] && ds.X(r, 1) == x[1]) return VecD{ds.U(r, 0)};
    return VecD{0.0};
  };
  CHECK(max_relative_error(exact, ds).value == 0.0);

  // single row reports that row's error
  Dataset one = tiny_dataset(1);
  const MaxRelError single = max_relative_error(pred, one);
  CHECK(single.row == 0);
}

TEST_CASE("max relative error is idempotent under dataset duplication") {
  const Dataset ds = tiny_dataset(20);
  Dataset doubled = ds;
  doubled.X = Mat(40, 2);
  doubled.U = Mat(40, 1);
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 2; ++c) doubled.X(r, c) = ds.X(r % 20, c);
    doubled.U(r, 0) = ds.U(r % 20, 0);
  }
  const Predictor pred = [](std::span<const double> x) {
    return VecD{x[0] * x[1]};
  };
  CHECK(max_relative_error(pred, ds).value ==
        max_relative_error(pred, doubled).value);
}
