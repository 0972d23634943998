#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "ddnn/error.hpp"
#include "ddnn/generators.hpp"
#include "ddnn/partition.hpp"
#include "ddnn/rng.hpp"

using namespace ddnn;

namespace {

Box unit_square() { return Box{{0.0, 0.0}, {1.0, 1.0}}; }

Dataset grid_dataset(int nx, int nz) {
  Dataset ds;
  ds.spatial_dim = 2;
  ds.out_dim = 1;
  ds.X = Mat(nx * nz, 2);
  ds.U = Mat(nx * nz, 1);
  int r = 0;
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz) {
      ds.X(r, 0) = static_cast<double>(ix) / (nx - 1);
      ds.X(r, 1) = static_cast<double>(iz) / (nz - 1);
      ds.U(r, 0) = 0.0;
      ++r;
    }
  return ds;
}

}  // namespace

TEST_CASE("3x1 split stacks three boxes of height 1/3") {
  const Partition part = partition_grid(unit_square(), {3, 1}, 10);
  REQUIRE(part.subdomains.size() == 3);
  REQUIRE(part.interfaces.size() == 2);
  for (int i = 0; i < 3; ++i) {
    const Box& b = part.subdomains[i];
    CHECK(b.lo[0] == 0.0);
    CHECK(b.hi[0] == 1.0);
    CHECK(b.hi[1] - b.lo[1] == doctest::Approx(1.0 / 3.0));
  }
  for (const auto& iface : part.interfaces) {
    CHECK(iface.axis == 1);  // horizontal interfaces
    CHECK(iface.normal.dir[1] == 1.0);
    // collocation points lie on the facet
    for (int r = 0; r < iface.collocation.rows; ++r)
      CHECK(std::fabs(iface.collocation(r, 1) - iface.coord) < 1e-12);
  }
  CHECK(part.interfaces[0].left_id == 0);
  CHECK(part.interfaces[0].right_id == 1);
  CHECK(part.interfaces[1].left_id == 1);
  CHECK(part.interfaces[1].right_id == 2);
}

TEST_CASE("3x3 split and the degenerate 1x1 case") {
  const Partition p33 = partition_grid(unit_square(), {3, 3}, 4);
  CHECK(p33.subdomains.size() == 9);
  CHECK(p33.interfaces.size() == 12);

  const Partition p11 = partition_grid(unit_square(), {1, 1}, 4);
  CHECK(p11.subdomains.size() == 1);
  CHECK(p11.interfaces.empty());
}

TEST_CASE("interface count formula K(L-1) + L(K-1)") {
  for (int k = 1; k <= 6; ++k)
    for (int l = 1; l <= 6; ++l) {
      const Partition p = partition_grid(unit_square(), {k, l}, 3);
      CHECK(static_cast<int>(p.interfaces.size()) == k * (l - 1) + l * (k - 1));
    }
}

TEST_CASE("zero split count is rejected") {
  CHECK_THROWS_AS(partition_grid(unit_square(), {0, 1}, 4), Error);
  Box degenerate{{0.0, 0.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(partition_grid(degenerate, {1, 1}, 4), Error);
}

TEST_CASE("collocation points on a segment facet") {
  Box facet{{0.0, 0.5}, {1.0, 0.5}};
  const Mat pts = collocation_points(facet, 1, 10);
  REQUIRE(pts.rows == 10);
  CHECK(pts(0, 0) == 0.0);
  CHECK(pts(9, 0) == 1.0);
  for (int i = 1; i < 10; ++i)
    CHECK(pts(i, 0) - pts(i - 1, 0) == doctest::Approx(1.0 / 9.0));

  const Mat two = collocation_points(facet, 1, 2);
  REQUIRE(two.rows == 2);
  CHECK(two(0, 0) == 0.0);
  CHECK(two(1, 0) == 1.0);

  CHECK_THROWS_AS(collocation_points(facet, 1, 1), Error);
}

TEST_CASE("3D facet with target 73 points gives a grid within one row/column") {
  Box facet{{-10.0, -10.0, 35.0}, {10.0, 10.0, 35.0}};
  const Mat pts = collocation_points(facet, 2, 73);
  CHECK(pts.rows == 72);  // 9 x 8 tensor grid
  for (int r = 0; r < pts.rows; ++r) CHECK(pts(r, 2) == 35.0);
}

TEST_CASE("assign_samples drops interface rows and splits the rest") {
  // 70 z-rows at j/69: rows j = 23 and j = 46 lie exactly on the 3x1
  // interface lines and are discarded.
  const Dataset ds = grid_dataset(1, 70);
  const Partition part = partition_grid(unit_square(), {3, 1}, 4);
  const AssignResult res = assign_samples(ds, part);
  CHECK(res.discarded == 2);
  REQUIRE(res.locals.size() == 3);
  CHECK(res.locals[0].count() == 23);
  CHECK(res.locals[1].count() == 22);
  CHECK(res.locals[2].count() == 23);
  // partition property: kept + discarded = total
  int kept = 0;
  for (const auto& l : res.locals) kept += l.count();
  CHECK(kept + res.discarded == ds.rows());
}

TEST_CASE("single subdomain keeps every sample") {
  const Dataset ds = grid_dataset(5, 7);
  const Partition part = partition_grid(unit_square(), {1, 1}, 4);
  const AssignResult res = assign_samples(ds, part);
  CHECK(res.discarded == 0);
  CHECK(res.locals[0].count() == ds.rows());
}

TEST_CASE("a point exactly on an interface line is discarded") {
  Dataset ds;
  ds.spatial_dim = 2;
  ds.out_dim = 1;
  ds.X = Mat(1, 2);
  ds.U = Mat(1, 1);
  ds.X(0, 0) = 0.25;
  ds.X(0, 1) = 0.5;
  const Partition part = partition_grid(unit_square(), {2, 1}, 4);
  const AssignResult res = assign_samples(ds, part);
  CHECK(res.discarded == 1);
  CHECK(res.locals[0].count() == 0);
}

TEST_CASE("out-of-domain samples are reported with row indices") {
  Dataset ds = grid_dataset(3, 3);
  ds.X(4, 0) = 2.5;
  const Partition part = partition_grid(unit_square(), {2, 2}, 4);
  try {
    assign_samples(ds, part);
    FAIL("expected out-of-domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfDomain);
    CHECK(std::string(e.what()).find("4") != std::string::npos);
  }
}

TEST_CASE("tiling: every random point has exactly one owner") {
  const Partition part = partition_grid(unit_square(), {3, 4}, 4);
  Rng rng(99);
  for (int i = 0; i < 10000; ++i) {
    const VecD pt{rng.next_uniform(), rng.next_uniform()};
    const int id = part.subdomain_of(pt);
    REQUIRE(id >= 0);
    REQUIRE(id < 12);
    // owner's closed box contains the point
    const Box& b = part.subdomains[id];
    CHECK(pt[0] >= b.lo[0] - 1e-12);
    CHECK(pt[0] <= b.hi[0] + 1e-12);
    CHECK(pt[1] >= b.lo[1] - 1e-12);
    CHECK(pt[1] <= b.hi[1] + 1e-12);
    // strictly interior points match a brute-force interior scan
    int interior_owner = -1, interior_count = 0;
    for (std::size_t s = 0; s < part.subdomains.size(); ++s) {
      const Box& c = part.subdomains[s];
      if (pt[0] > c.lo[0] + 1e-9 && pt[0] < c.hi[0] - 1e-9 &&
          pt[1] > c.lo[1] + 1e-9 && pt[1] < c.hi[1] - 1e-9) {
        interior_owner = static_cast<int>(s);
        ++interior_count;
      }
    }
    if (interior_count == 1) CHECK(id == interior_owner);
  }
}

TEST_CASE("apply_gap with zero rows is a no-op") {
  const Dataset ds = grid_dataset(5, 30);
  const Partition part = partition_grid(unit_square(), {3, 1}, 4);
  AssignResult res = assign_samples(ds, part);
  const auto counts_before = [&] {
    std::vector<int> c;
    for (const auto& l : res.locals) c.push_back(l.count());
    return c;
  }();
  apply_gap(res, part, 0);
  for (std::size_t i = 0; i < res.locals.size(); ++i)
    CHECK(res.locals[i].count() == counts_before[i]);
  for (double g : res.interface_gaps) CHECK(g == 0.0);
}

TEST_CASE("apply_gap removes exactly the points within one spacing") {
  const int nz = 31;  // rows at j/30, interfaces of a 3x1 split at 10/30, 20/30
  const Dataset ds = grid_dataset(4, nz);
  const Partition part = partition_grid(unit_square(), {3, 1}, 4);
  AssignResult res = assign_samples(ds, part);
  AssignResult gapped = res;
  apply_gap(gapped, part, 1);

  const double h = 1.0 / (nz - 1);
  // brute force: any assigned point within h (+slack) of an interface goes
  for (std::size_t s = 0; s < res.locals.size(); ++s) {
    std::multiset<double> expect;
    for (int r = 0; r < res.locals[s].count(); ++r) {
      const double z = res.locals[s].X(r, 1);
      bool near = false;
      for (const auto& iface : part.interfaces)
        if (std::fabs(z - iface.coord) <= h + 1e-9 &&
            (iface.left_id == static_cast<int>(s) || iface.right_id == static_cast<int>(s)))
          near = true;
      if (!near) expect.insert(z);
    }
    std::multiset<double> got;
    for (int r = 0; r < gapped.locals[s].count(); ++r)
      got.insert(gapped.locals[s].X(r, 1));
    CHECK(expect == got);
  }
}

TEST_CASE("desk-scale gap of six rows reports ~0.366") {
  Dataset ds = generate_2d_field(21, 70);
  normalize_in_place(ds);
  Box bounds{{-1.0, -1.0}, {1.0, 1.0}};
  const Partition part = partition_grid(bounds, {3, 1}, 10);
  AssignResult res = assign_samples(ds, part);
  CHECK(res.discarded == 2 * 21);
  apply_gap(res, part, 6);
  for (double g : res.interface_gaps) CHECK(std::fabs(g - 0.366) < 0.02);
}

TEST_CASE("apply_gap refuses to empty a subdomain") {
  const Dataset ds = grid_dataset(3, 9);
  const Partition part = partition_grid(unit_square(), {3, 1}, 4);
  AssignResult res = assign_samples(ds, part);
  CHECK_THROWS_AS(apply_gap(res, part, 3), Error);
}
