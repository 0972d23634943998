#include "ddnn/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddnn/error.hpp"

namespace ddnn {

namespace {

std::vector<int> splits_to_axis_counts(const std::vector<int>& splits, int dim) {
  if (static_cast<int>(splits.size()) != dim)
    fail(ErrorCode::kInvalidPartition,
         "expected " + std::to_string(dim) + " split counts, got " +
             std::to_string(splits.size()));
  for (int s : splits)
    if (s < 1)
      fail(ErrorCode::kInvalidPartition, "split counts must be at least 1");
  if (dim == 2) return {splits[1], splits[0]};  // (k,l) -> axis0=l, axis1=k
  return splits;                                // 3D maps in axis order
}

int cell_index(const Partition& part, int axis, double v) {
  const double lo = part.bounds.lo[axis];
  const double w = (part.bounds.hi[axis] - lo) / part.axis_counts[axis];
  int idx = static_cast<int>(std::floor((v - lo) / w));
  return std::clamp(idx, 0, part.axis_counts[axis] - 1);
}

int flat_id(const Partition& part, const std::vector<int>& cell) {
  int id = 0;
  for (int a = 0; a < part.spatial_dim(); ++a) id = id * part.axis_counts[a] + cell[a];
  return id;
}

}  // namespace

int Partition::subdomain_of(std::span<const double> pt) const {
  std::vector<int> cell(spatial_dim());
  for (int a = 0; a < spatial_dim(); ++a) cell[a] = cell_index(*this, a, pt[a]);
  return flat_id(*this, cell);
}

int Partition::interface_at(std::span<const double> pt, double tol) const {
  for (const auto& iface : interfaces) {
    if (std::fabs(pt[iface.axis] - iface.coord) > tol) continue;
    bool inside = true;
    for (int a = 0; a < spatial_dim(); ++a) {
      if (a == iface.axis) continue;
      if (pt[a] < iface.facet.lo[a] - tol || pt[a] > iface.facet.hi[a] + tol) {
        inside = false;
        break;
      }
    }
    if (inside) return iface.id;
  }
  return -1;
}

std::vector<int> Partition::interfaces_of(int subdomain_id) const {
  std::vector<int> out;
  for (const auto& iface : interfaces)
    if (iface.left_id == subdomain_id || iface.right_id == subdomain_id)
      out.push_back(iface.id);
  return out;
}

Mat collocation_points(const Box& facet, int axis, int n) {
  if (n < 2) fail(ErrorCode::kInvalidCount, "need at least 2 collocation points");
  const int dim = facet.dim();
  std::vector<int> free_axes;
  for (int a = 0; a < dim; ++a)
    if (a != axis) free_axes.push_back(a);

  if (free_axes.size() == 1) {
    const int a = free_axes[0];
    Mat pts(n, dim);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < dim; ++d) pts(i, d) = facet.lo[d];
      pts(i, a) = facet.lo[a] + (facet.hi[a] - facet.lo[a]) * i / (n - 1);
    }
    return pts;
  }

  // Rectangular facet: tensor grid with r*c within one row/column of n.
  const int r = std::max(2, static_cast<int>(std::llround(std::sqrt(static_cast<double>(n)))));
  const int c = std::max(2, static_cast<int>(std::llround(static_cast<double>(n) / r)));
  const int a0 = free_axes[0], a1 = free_axes[1];
  Mat pts(r * c, dim);
  int row = 0;
  for (int i = 0; i < r; ++i) {
    const double v0 = facet.lo[a0] + (facet.hi[a0] - facet.lo[a0]) * i / (r - 1);
    for (int j = 0; j < c; ++j) {
      const double v1 = facet.lo[a1] + (facet.hi[a1] - facet.lo[a1]) * j / (c - 1);
      for (int d = 0; d < dim; ++d) pts(row, d) = facet.lo[d];
      pts(row, a0) = v0;
      pts(row, a1) = v1;
      ++row;
    }
  }
  return pts;
}

Partition partition_grid(const Box& bounds, const std::vector<int>& splits,
                         int collocation_per_interface) {
  const int dim = bounds.dim();
  if (dim < 2 || dim > 3)
    fail(ErrorCode::kInvalidPartition, "only 2D and 3D domains are supported");
  for (int a = 0; a < dim; ++a)
    if (!(bounds.hi[a] > bounds.lo[a]))
      fail(ErrorCode::kInvalidPartition, "degenerate bounds on axis " + std::to_string(a));

  Partition part;
  part.bounds = bounds;
  part.axis_counts = splits_to_axis_counts(splits, dim);

  // Boxes, row-major over cell indices.
  int total = 1;
  for (int c : part.axis_counts) total *= c;
  std::vector<int> cell(dim, 0);
  for (int id = 0; id < total; ++id) {
    Box b;
    b.lo.resize(dim);
    b.hi.resize(dim);
    for (int a = 0; a < dim; ++a) {
      const double w = (bounds.hi[a] - bounds.lo[a]) / part.axis_counts[a];
      b.lo[a] = bounds.lo[a] + w * cell[a];
      b.hi[a] = (cell[a] + 1 == part.axis_counts[a]) ? bounds.hi[a]
                                                     : bounds.lo[a] + w * (cell[a] + 1);
    }
    part.subdomains.push_back(std::move(b));
    for (int a = dim - 1; a >= 0; --a) {
      if (++cell[a] < part.axis_counts[a]) break;
      cell[a] = 0;
    }
  }

  // Interfaces in ascending (left_id, axis) order.
  std::vector<int> stride(dim);
  stride[dim - 1] = 1;
  for (int a = dim - 2; a >= 0; --a) stride[a] = stride[a + 1] * part.axis_counts[a + 1];

  std::fill(cell.begin(), cell.end(), 0);
  for (int id = 0; id < total; ++id) {
    for (int a = 0; a < dim; ++a) {
      if (cell[a] + 1 >= part.axis_counts[a]) continue;
      InterfaceSegment iface{.id = static_cast<int>(part.interfaces.size()),
                             .left_id = id,
                             .right_id = id + stride[a],
                             .axis = a,
                             .coord = part.subdomains[id].hi[a],
                             .facet = part.subdomains[id],
                             .normal = NormalDirection([&] {
                               VecD n(dim, 0.0);
                               n[a] = 1.0;
                               return n;
                             }()),
                             .collocation = {}};
      iface.facet.lo[a] = iface.coord;
      iface.facet.hi[a] = iface.coord;
      iface.collocation = collocation_points(iface.facet, a, collocation_per_interface);
      part.interfaces.push_back(std::move(iface));
    }
    for (int a = dim - 1; a >= 0; --a) {
      if (++cell[a] < part.axis_counts[a]) break;
      cell[a] = 0;
    }
  }
  return part;
}

AssignResult assign_samples(const Dataset& ds, const Partition& part, double tol) {
  const int dim = part.spatial_dim();
  if (ds.spatial_dim != dim)
    fail(ErrorCode::kShapeMismatch, "dataset and partition dimensions differ");

  std::vector<int> offenders;
  for (int r = 0; r < ds.rows(); ++r)
    for (int a = 0; a < dim; ++a)
      if (ds.X(r, a) < part.bounds.lo[a] - tol || ds.X(r, a) > part.bounds.hi[a] + tol) {
        offenders.push_back(r);
        break;
      }
  if (!offenders.empty()) {
    std::string msg = "samples outside domain bounds, rows:";
    for (std::size_t i = 0; i < offenders.size() && i < 10; ++i)
      msg += " " + std::to_string(offenders[i]);
    if (offenders.size() > 10) msg += " ...";
    fail(ErrorCode::kOutOfDomain, msg);
  }

  AssignResult out;
  out.interface_gaps.assign(part.interfaces.size(), 0.0);
  std::vector<std::vector<int>> member_rows(part.subdomains.size());
  for (int r = 0; r < ds.rows(); ++r) {
    VecD pt(dim);
    for (int a = 0; a < dim; ++a) pt[a] = ds.X(r, a);
    // Discard anything within tol of an internal split plane.
    bool on_iface = false;
    for (int a = 0; a < dim && !on_iface; ++a) {
      const int n = part.axis_counts[a];
      const double w = (part.bounds.hi[a] - part.bounds.lo[a]) / n;
      for (int j = 1; j < n; ++j)
        if (std::fabs(pt[a] - (part.bounds.lo[a] + j * w)) <= tol) {
          on_iface = true;
          break;
        }
    }
    if (on_iface) {
      ++out.discarded;
      out.discarded_rows.push_back(r);
      continue;
    }
    member_rows[part.subdomain_of(pt)].push_back(r);
  }

  for (std::size_t i = 0; i < part.subdomains.size(); ++i) {
    LocalDataset local;
    local.subdomain_id = static_cast<int>(i);
    local.X = Mat(static_cast<int>(member_rows[i].size()), ds.X.cols);
    local.U = Mat(static_cast<int>(member_rows[i].size()), ds.U.cols);
    for (std::size_t k = 0; k < member_rows[i].size(); ++k) {
      const int r = member_rows[i][k];
      for (int c = 0; c < ds.X.cols; ++c) local.X(static_cast<int>(k), c) = ds.X(r, c);
      for (int c = 0; c < ds.U.cols; ++c) local.U(static_cast<int>(k), c) = ds.U(r, c);
    }
    out.locals.push_back(std::move(local));
  }
  return out;
}

namespace {

/// Distinct distance levels (ascending) of a local dataset to a plane.
VecD distance_levels(const LocalDataset& local, int axis, double coord, double tol) {
  VecD d;
  d.reserve(local.count());
  for (int r = 0; r < local.count(); ++r)
    d.push_back(std::fabs(local.X(r, axis) - coord));
  std::sort(d.begin(), d.end());
  VecD levels;
  for (double v : d)
    if (levels.empty() || v > levels.back() + tol) levels.push_back(v);
  return levels;
}

void remove_within(LocalDataset& local, int axis, double coord, double cutoff) {
  Mat X(0, local.X.cols), U(0, local.U.cols);
  std::vector<double> xs, us;
  int kept = 0;
  for (int r = 0; r < local.count(); ++r) {
    if (std::fabs(local.X(r, axis) - coord) <= cutoff) continue;
    for (int c = 0; c < local.X.cols; ++c) xs.push_back(local.X(r, c));
    for (int c = 0; c < local.U.cols; ++c) us.push_back(local.U(r, c));
    ++kept;
  }
  X.rows = kept;
  X.a = std::move(xs);
  U.rows = kept;
  U.a = std::move(us);
  local.X = std::move(X);
  local.U = std::move(U);
}

}  // namespace

void apply_gap(AssignResult& assigned, const Partition& part, int rows, double tol) {
  if (rows < 0) fail(ErrorCode::kInvalidCount, "gap rows must be non-negative");
  if (rows == 0) return;

  assigned.interface_gaps.assign(part.interfaces.size(), 0.0);
  for (const auto& iface : part.interfaces) {
    double nearest_kept[2] = {0.0, 0.0};
    double spacing = 0.0;
    const int sides[2] = {iface.left_id, iface.right_id};
    for (int s = 0; s < 2; ++s) {
      LocalDataset& local = assigned.locals[sides[s]];
      const VecD levels = distance_levels(local, iface.axis, iface.coord, tol);
      if (static_cast<int>(levels.size()) <= rows)
        fail(ErrorCode::kEmptySubdomain,
             "gap of " + std::to_string(rows) + " rows empties subdomain " +
                 std::to_string(sides[s]));
      if (levels.size() >= 2) spacing = std::max(spacing, levels[1] - levels[0]);
      remove_within(local, iface.axis, iface.coord, levels[rows - 1] + tol);
      nearest_kept[s] = levels[rows];
      if (local.count() == 0)
        fail(ErrorCode::kEmptySubdomain,
             "gap of " + std::to_string(rows) + " rows empties subdomain " +
                 std::to_string(sides[s]));
    }
    // Data-free band beyond the natural grid spacing.
    assigned.interface_gaps[iface.id] =
        std::max(0.0, nearest_kept[0] + nearest_kept[1] - spacing);
  }
}

}  // namespace ddnn
