#include "ddnn/generators.hpp"

#include <cmath>

#include "ddnn/error.hpp"
#include "ddnn/rng.hpp"

namespace ddnn {

Dataset generate_2d_field(int nx, int nz, double boundary_layer) {
  if (nx < 2 || nz < 2)
    fail(ErrorCode::kInvalidConfig, "2d field grid needs at least 2x2 points");
  if (boundary_layer <= 0.0)
    fail(ErrorCode::kInvalidConfig, "boundary layer must be positive");

  Dataset ds;
  ds.spatial_dim = 2;
  ds.param_dim = 0;
  ds.out_dim = 1;
  ds.X = Mat(nx * nz, 2);
  ds.U = Mat(nx * nz, 1);
  int r = 0;
  for (int ix = 0; ix < nx; ++ix) {
    const double x = static_cast<double>(ix) / (nx - 1);
    for (int iz = 0; iz < nz; ++iz) {
      const double z = static_cast<double>(iz) / (nz - 1);
      ds.X(r, 0) = x;
      ds.X(r, 1) = z;
      ds.U(r, 0) = (2.0 * x - 1.0) * z * (1.0 - std::exp(-z / boundary_layer));
      ++r;
    }
  }
  return ds;
}

double youngs_modulus(double kappa, double mu) {
  return 9.0 * kappa * mu / (3.0 * kappa + mu);
}

double poisson_ratio(double kappa, double mu) {
  return (3.0 * kappa - 2.0 * mu) / (2.0 * (3.0 * kappa + mu));
}

std::pair<double, double> lognormal_params(double mean, double stddev) {
  const double sigma2 = std::log(1.0 + (stddev * stddev) / (mean * mean));
  return {std::log(mean) - 0.5 * sigma2, std::sqrt(sigma2)};
}

Dataset generate_3d_parametric(int n_samples, const MaterialDistribution& dist,
                               const CylinderGrid& grid, std::uint64_t seed) {
  if (n_samples < 1) fail(ErrorCode::kInvalidConfig, "need at least one sample");
  if (grid.nx < 2 || grid.ny < 2 || grid.nz < 2)
    fail(ErrorCode::kInvalidConfig, "cylinder grid needs at least 2 points per axis");

  constexpr double kRadius = 10.0;   // mm
  constexpr double kHeight = 70.0;   // mm
  constexpr double kForce = 20.0;    // kN, compressive
  const double area = M_PI * kRadius * kRadius;

  // Lattice points inside the cylinder.
  std::vector<double> pts;
  for (int ix = 0; ix < grid.nx; ++ix) {
    const double x = -kRadius + 2.0 * kRadius * ix / (grid.nx - 1);
    for (int iy = 0; iy < grid.ny; ++iy) {
      const double y = -kRadius + 2.0 * kRadius * iy / (grid.ny - 1);
      if (x * x + y * y > kRadius * kRadius + 1e-9) continue;
      for (int iz = 0; iz < grid.nz; ++iz) {
        const double z = kHeight * iz / (grid.nz - 1);
        pts.push_back(x);
        pts.push_back(y);
        pts.push_back(z);
      }
    }
  }
  const int n_pts = static_cast<int>(pts.size() / 3);
  if (n_pts == 0)
    fail(ErrorCode::kInvalidConfig, "no lattice points fall inside the cylinder");

  const auto [kappa_m, kappa_s] = lognormal_params(dist.kappa_mean, dist.kappa_std);
  const auto [mu_m, mu_s] = lognormal_params(dist.mu_mean, dist.mu_std);

  Dataset ds;
  ds.spatial_dim = 3;
  ds.param_dim = 2;
  ds.out_dim = 3;
  ds.X = Mat(n_pts * n_samples, 5);
  ds.U = Mat(n_pts * n_samples, 3);

  Rng rng(seed);
  int r = 0;
  for (int s = 0; s < n_samples; ++s) {
    double kappa = 0.0, mu = 0.0;
    do {
      kappa = std::exp(kappa_m + kappa_s * rng.next_normal());
      mu = std::exp(mu_m + mu_s * rng.next_normal());
    } while (kappa <= 0.0 || mu <= 0.0);

    const double E = youngs_modulus(kappa, mu);
    const double nu = poisson_ratio(kappa, mu);
    const double eps = -kForce / (E * area);

    for (int p = 0; p < n_pts; ++p) {
      const double x = pts[3 * p], y = pts[3 * p + 1], z = pts[3 * p + 2];
      ds.X(r, 0) = x;
      ds.X(r, 1) = y;
      ds.X(r, 2) = z;
      ds.X(r, 3) = kappa;
      ds.X(r, 4) = mu;
      ds.U(r, 0) = -nu * eps * x;
      ds.U(r, 1) = -nu * eps * y;
      ds.U(r, 2) = eps * z;
      ++r;
    }
  }
  return ds;
}

}  // namespace ddnn
