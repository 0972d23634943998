#pragma once

#include <functional>
#include <span>

#include "ddnn/dataset.hpp"
#include "ddnn/mat.hpp"

namespace ddnn {

/// e_rel = |pred - truth| / (|truth| + 1), per component.
VecD relative_error_components(std::span<const double> pred,
                               std::span<const double> truth);

/// Vector outputs reduce by the maximum over components.
double relative_error(std::span<const double> pred, std::span<const double> truth);

/// Per-point mean and standard deviation over samples, with the population
/// 1/N estimator. Rows of (X, V) sharing identical spatial coordinates form
/// one point, in first-appearance order.
struct FieldStats {
  Mat points;  // unique spatial points
  Mat mean;    // per point x component
  Mat stddev;
  std::vector<std::vector<int>> rows;  // contributing row indices per point
};
FieldStats field_statistics(const Mat& X, int spatial_dim, const Mat& V);

using Predictor = std::function<VecD(std::span<const double> x)>;

/// Per-row relative-error field of a predictor over a dataset.
struct ErrorField {
  VecD e_rel;              // per row, max over components
  Mat e_rel_components;    // per row x component
  Mat predictions;         // per row x component
  double max_e_rel = 0.0;
  int argmax_row = -1;
  double mean_e_rel = 0.0;
};
ErrorField error_field(const Predictor& predict, const Dataset& ds);

struct MaxRelError {
  double value = 0.0;
  int row = -1;
  VecD point;
};
MaxRelError max_relative_error(const Predictor& predict, const Dataset& ds);

}  // namespace ddnn
