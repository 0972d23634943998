#pragma once

#include <string>
#include <vector>

#include "ddnn/mat.hpp"

namespace ddnn {

/// Per-column affine range map onto [-1, 1]. Constant columns are flagged
/// and map to 0.
struct ColumnRange {
  double lo = 0.0;
  double hi = 0.0;
  bool degenerate = false;

  double to_norm(double v) const {
    if (degenerate) return 0.0;
    return 2.0 * (v - lo) / (hi - lo) - 1.0;
  }
  double from_norm(double v) const {
    if (degenerate) return lo;
    return (v + 1.0) * 0.5 * (hi - lo) + lo;
  }
};

struct NormalizeTransform {
  std::vector<ColumnRange> inputs;
  std::vector<ColumnRange> outputs;
  bool empty() const { return inputs.empty() && outputs.empty(); }
};

/// Rows of (spatial coords, optional parameter sample, target field value).
/// Inputs X hold the spatial columns first, then parameter columns.
struct Dataset {
  int spatial_dim = 0;
  int param_dim = 0;
  int out_dim = 0;
  Mat X;
  Mat U;
  bool normalized = false;
  NormalizeTransform transform;

  int rows() const { return X.rows; }
  int input_dim() const { return spatial_dim + param_dim; }
};

/// Min-max normalization of every input and output column onto [-1, 1].
/// Returns the transform (also stored on the dataset).
NormalizeTransform normalize_in_place(Dataset& ds);

/// Applies an existing transform (e.g. the one a model was trained with).
void apply_transform(Dataset& ds, const NormalizeTransform& tf);

/// Distinct parameter samples in first-appearance order (exact comparison).
std::vector<VecD> unique_param_samples(const Dataset& ds);

/// CSV schema: header `x,y[,z][,kappa,mu],u1[,u2,u3]`, comma separated,
/// 17-significant-digit floats on save.
Dataset load_csv(const std::string& path);
void save_csv(const std::string& path, const Dataset& ds);

}  // namespace ddnn
