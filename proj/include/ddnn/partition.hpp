#pragma once

#include <vector>

#include "ddnn/dataset.hpp"
#include "ddnn/mat.hpp"
#include "ddnn/mlp.hpp"

namespace ddnn {

/// Axis-aligned box.
struct Box {
  VecD lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
};

/// Shared facet between two adjacent subdomains. The facet is degenerate
/// along `axis` (lo[axis] == hi[axis] == coord); the normal points from
/// left_id to right_id along +axis.
struct InterfaceSegment {
  int id = 0;
  int left_id = 0;
  int right_id = 0;
  int axis = 0;
  double coord = 0.0;
  Box facet;
  NormalDirection normal;
  Mat collocation;  // n x spatial_dim, on the facet
};

/// Non-overlapping grid of equal boxes tiling `bounds`.
///
/// Split counts follow the stacked-domain convention: in 2D the pair (k, l)
/// splits (vertical axis 1, horizontal axis 0) so (3,1) gives three stacked
/// boxes; in 3D the triple (k, l, m) maps to axes (0, 1, 2) in order so
/// (1,1,2) gives two vertical halves. Subdomain ids are row-major over the
/// per-axis cell indices.
struct Partition {
  Box bounds;
  std::vector<int> axis_counts;  // boxes per axis
  std::vector<Box> subdomains;
  std::vector<InterfaceSegment> interfaces;

  int spatial_dim() const { return bounds.dim(); }
  /// Box whose (closed) region contains the point; ties broken toward the
  /// lower cell so every in-bounds point has exactly one owner.
  int subdomain_of(std::span<const double> pt) const;
  /// Id of an interface whose facet contains the point within tol, or -1.
  /// Corner points shared by several facets report the lowest interface id.
  int interface_at(std::span<const double> pt, double tol) const;
  /// Adjacent interface ids of a subdomain, ascending.
  std::vector<int> interfaces_of(int subdomain_id) const;
};

Partition partition_grid(const Box& bounds, const std::vector<int>& splits,
                         int collocation_per_interface);

/// Uniform points on a facet, endpoints included. For 2D facets (a segment)
/// exactly n points; for 3D facets (a rectangle) an r x c tensor grid with
/// r*c within one row/column of n.
Mat collocation_points(const Box& facet, int axis, int n);

struct LocalDataset {
  int subdomain_id = 0;
  Mat X;  // spatial + parameter columns
  Mat U;
  int count() const { return X.rows; }
};

struct AssignResult {
  std::vector<LocalDataset> locals;
  int discarded = 0;                 // rows on interfaces
  std::vector<int> discarded_rows;   // original row indices
  VecD interface_gaps;               // normalized gap per interface (apply_gap)
};

/// Assigns every sample to the box whose interior contains it; samples
/// within tol of an internal facet are discarded and counted.
AssignResult assign_samples(const Dataset& ds, const Partition& part, double tol = 1e-9);

/// Removes the `rows` nearest grid-lines of samples on each side of every
/// interface. Collocation stays on the original facet (the midline of the
/// removed band). Errors if a subdomain would end up empty.
void apply_gap(AssignResult& assigned, const Partition& part, int rows,
               double tol = 1e-9);

}  // namespace ddnn
