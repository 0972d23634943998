#pragma once

#include <cstdint>
#include <utility>

#include "ddnn/dataset.hpp"

namespace ddnn {

/// Manufactured 2D displacement-style field on [0,1]^2:
///   u(x, z) = (2x - 1) * z * (1 - exp(-z / boundary_layer))
/// Clamped at z = 0, antisymmetric about x = 0.5, with a steep gradient
/// band of width ~ boundary_layer near the bottom. Raw (unnormalized).
Dataset generate_2d_field(int nx, int nz, double boundary_layer = 0.05);

/// Lognormal material parameters, moment-matched to the given mean/std.
struct MaterialDistribution {
  double kappa_mean = 175.0;  // GPa
  double kappa_std = 10.0;
  double mu_mean = 81.0;
  double mu_std = 10.0;
};

/// Cartesian lattice over the cylinder bounding box, filtered to the
/// cylinder (diameter 20, height 70 mm).
struct CylinderGrid {
  int nx = 5;
  int ny = 5;
  int nz = 9;
};

/// Uniaxial compression of the cylinder under F = 20 kN: per material sample
/// zeta = (kappa, mu),
///   E  = 9 kappa mu / (3 kappa + mu),  nu = (3 kappa - 2 mu) / (2 (3 kappa + mu)),
///   eps = -F / (E A),  u_z = eps z,  u_x = -nu eps x,  u_y = -nu eps y.
/// Rows are every grid point for every sample (sample-major). Raw values.
Dataset generate_3d_parametric(int n_samples, const MaterialDistribution& dist,
                               const CylinderGrid& grid, std::uint64_t seed);

double youngs_modulus(double kappa, double mu);
double poisson_ratio(double kappa, double mu);

/// (log-space mean, log-space sigma) matching the given moments.
std::pair<double, double> lognormal_params(double mean, double stddev);

}  // namespace ddnn
