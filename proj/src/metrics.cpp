#include "ddnn/metrics.hpp"

#include <cmath>
#include <map>

#include "ddnn/error.hpp"

namespace ddnn {

VecD relative_error_components(std::span<const double> pred,
                               std::span<const double> truth) {
  if (pred.size() != truth.size())
    fail(ErrorCode::kShapeMismatch, "prediction/truth length mismatch");
  VecD e(pred.size());
  for (std::size_t c = 0; c < pred.size(); ++c)
    e[c] = std::fabs(pred[c] - truth[c]) / (std::fabs(truth[c]) + 1.0);
  return e;
}

double relative_error(std::span<const double> pred, std::span<const double> truth) {
  double m = 0.0;
  for (double e : relative_error_components(pred, truth)) m = std::max(m, e);
  return m;
}

FieldStats field_statistics(const Mat& X, int spatial_dim, const Mat& V) {
  if (X.rows == 0) fail(ErrorCode::kEmptyData, "no rows for field statistics");
  if (X.rows != V.rows) fail(ErrorCode::kShapeMismatch, "X/V row mismatch");

  FieldStats st;
  std::map<VecD, int> index;
  for (int r = 0; r < X.rows; ++r) {
    VecD key(spatial_dim);
    for (int a = 0; a < spatial_dim; ++a) key[a] = X(r, a);
    auto [it, fresh] = index.emplace(std::move(key), static_cast<int>(st.rows.size()));
    if (fresh) st.rows.emplace_back();
    st.rows[it->second].push_back(r);
  }

  const int n_pts = static_cast<int>(st.rows.size());
  st.points = Mat(n_pts, spatial_dim);
  st.mean = Mat(n_pts, V.cols);
  st.stddev = Mat(n_pts, V.cols);
  for (const auto& [key, p] : index)
    for (int a = 0; a < spatial_dim; ++a) st.points(p, a) = key[a];

  for (int p = 0; p < n_pts; ++p) {
    const auto& rows = st.rows[p];
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (int c = 0; c < V.cols; ++c) {
      double mean = 0.0;
      for (int r : rows) mean += V(r, c);
      mean *= inv_n;
      double var = 0.0;
      for (int r : rows) {
        const double d = V(r, c) - mean;
        var += d * d;
      }
      st.mean(p, c) = mean;
      st.stddev(p, c) = std::sqrt(var * inv_n);  // population 1/N estimator
    }
  }
  return st;
}

ErrorField error_field(const Predictor& predict, const Dataset& ds) {
  if (ds.rows() == 0) fail(ErrorCode::kEmptyData, "empty dataset");
  ErrorField ef;
  ef.e_rel.resize(ds.rows());
  ef.e_rel_components = Mat(ds.rows(), ds.out_dim);
  ef.predictions = Mat(ds.rows(), ds.out_dim);
  double sum = 0.0;
  for (int r = 0; r < ds.rows(); ++r) {
    const VecD pred = predict(ds.X.row_span(r));
    const VecD comps = relative_error_components(pred, ds.U.row_span(r));
    double m = 0.0;
    for (int c = 0; c < ds.out_dim; ++c) {
      ef.e_rel_components(r, c) = comps[c];
      ef.predictions(r, c) = pred[c];
      m = std::max(m, comps[c]);
    }
    ef.e_rel[r] = m;
    sum += m;
    if (m > ef.max_e_rel || ef.argmax_row < 0) {
      ef.max_e_rel = m;
      ef.argmax_row = r;
    }
  }
  ef.mean_e_rel = sum / static_cast<double>(ds.rows());
  return ef;
}

MaxRelError max_relative_error(const Predictor& predict, const Dataset& ds) {
  const ErrorField ef = error_field(predict, ds);
  MaxRelError out;
  out.value = ef.max_e_rel;
  out.row = ef.argmax_row;
  out.point.resize(ds.spatial_dim);
  for (int a = 0; a < ds.spatial_dim; ++a) out.point[a] = ds.X(ef.argmax_row, a);
  return out;
}

}  // namespace ddnn
