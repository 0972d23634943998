#include "ddnn/dataset.hpp"

#include <map>

#include "ddnn/error.hpp"

namespace ddnn {

namespace {

ColumnRange column_range(const Mat& m, int col) {
  ColumnRange r;
  r.lo = m(0, col);
  r.hi = m(0, col);
  for (int i = 1; i < m.rows; ++i) {
    r.lo = std::min(r.lo, m(i, col));
    r.hi = std::max(r.hi, m(i, col));
  }
  r.degenerate = (r.lo == r.hi);
  return r;
}

void normalize_columns(Mat& m, const std::vector<ColumnRange>& ranges) {
  for (int i = 0; i < m.rows; ++i)
    for (int c = 0; c < m.cols; ++c) m(i, c) = ranges[c].to_norm(m(i, c));
}

}  // namespace

NormalizeTransform normalize_in_place(Dataset& ds) {
  if (ds.rows() == 0) fail(ErrorCode::kEmptyData, "cannot normalize an empty dataset");
  if (ds.normalized)
    fail(ErrorCode::kInvalidConfig, "dataset is already normalized");
  NormalizeTransform tf;
  for (int c = 0; c < ds.X.cols; ++c) tf.inputs.push_back(column_range(ds.X, c));
  for (int c = 0; c < ds.U.cols; ++c) tf.outputs.push_back(column_range(ds.U, c));
  normalize_columns(ds.X, tf.inputs);
  normalize_columns(ds.U, tf.outputs);
  ds.normalized = true;
  ds.transform = tf;
  return tf;
}

void apply_transform(Dataset& ds, const NormalizeTransform& tf) {
  if (ds.normalized)
    fail(ErrorCode::kInvalidConfig, "dataset is already normalized");
  if (static_cast<int>(tf.inputs.size()) != ds.X.cols ||
      static_cast<int>(tf.outputs.size()) != ds.U.cols)
    fail(ErrorCode::kShapeMismatch, "transform does not match dataset columns");
  normalize_columns(ds.X, tf.inputs);
  normalize_columns(ds.U, tf.outputs);
  ds.normalized = true;
  ds.transform = tf;
}

std::vector<VecD> unique_param_samples(const Dataset& ds) {
  std::vector<VecD> samples;
  if (ds.param_dim == 0) return samples;
  std::map<VecD, int> seen;
  for (int r = 0; r < ds.rows(); ++r) {
    VecD zeta(ds.param_dim);
    for (int c = 0; c < ds.param_dim; ++c) zeta[c] = ds.X(r, ds.spatial_dim + c);
    if (seen.emplace(zeta, 1).second) samples.push_back(std::move(zeta));
  }
  return samples;
}

}  // namespace ddnn
