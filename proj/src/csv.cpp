#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ddnn/dataset.hpp"
#include "ddnn/error.hpp"

namespace ddnn {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

struct Schema {
  int spatial_dim = 0;
  int param_dim = 0;
  int out_dim = 0;
};

Schema parse_header(const std::vector<std::string>& fields,
                    const std::string& path) {
  Schema s;
  std::size_t i = 0;
  const char* spatial_names[] = {"x", "y", "z"};
  while (i < fields.size() && s.spatial_dim < 3 &&
         fields[i] == spatial_names[s.spatial_dim]) {
    ++s.spatial_dim;
    ++i;
  }
  if (s.spatial_dim < 2)
    fail(ErrorCode::kParseError,
         path + ": header must start with x,y[,z], got '" +
             (fields.empty() ? "" : fields[0]) + "...'");
  if (i + 1 < fields.size() && fields[i] == "kappa" && fields[i + 1] == "mu") {
    s.param_dim = 2;
    i += 2;
  }
  const char* out_names[] = {"u1", "u2", "u3"};
  while (i < fields.size() && s.out_dim < 3 && fields[i] == out_names[s.out_dim]) {
    ++s.out_dim;
    ++i;
  }
  if (s.out_dim == 0 || i != fields.size())
    fail(ErrorCode::kParseError,
         path + ": header must end with u1[,u2,u3]; unexpected column " +
             (i < fields.size() ? "'" + fields[i] + "'" : "count"));
  return s;
}

double parse_cell(const std::string& cell, const std::string& path, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size())
      fail(ErrorCode::kParseError, path + ": non-numeric cell '" + cell +
                                       "' on line " + std::to_string(line_no));
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::kParseError, path + ": non-numeric cell '" + cell +
                                     "' on line " + std::to_string(line_no));
  }
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    fail(ErrorCode::kParseError, path + ": empty file, expected a header row");
  const Schema schema = parse_header(split_fields(line), path);
  const int n_cols = schema.spatial_dim + schema.param_dim + schema.out_dim;

  std::vector<double> xs, us;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) != n_cols)
      fail(ErrorCode::kParseError,
           path + ": expected " + std::to_string(n_cols) + " columns but got " +
               std::to_string(fields.size()) + " on line " +
               std::to_string(line_no));
    for (int c = 0; c < schema.spatial_dim + schema.param_dim; ++c)
      xs.push_back(parse_cell(fields[c], path, line_no));
    for (int c = 0; c < schema.out_dim; ++c)
      us.push_back(parse_cell(fields[schema.spatial_dim + schema.param_dim + c],
                              path, line_no));
  }

  Dataset ds;
  ds.spatial_dim = schema.spatial_dim;
  ds.param_dim = schema.param_dim;
  ds.out_dim = schema.out_dim;
  const int n = static_cast<int>(us.size()) / schema.out_dim;
  ds.X = Mat(n, schema.spatial_dim + schema.param_dim);
  ds.X.a = std::move(xs);
  ds.U = Mat(n, schema.out_dim);
  ds.U.a = std::move(us);
  return ds;
}

void save_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path);

  const char* spatial_names[] = {"x", "y", "z"};
  std::string header;
  for (int c = 0; c < ds.spatial_dim; ++c) {
    header += spatial_names[c];
    header += ',';
  }
  if (ds.param_dim == 2) header += "kappa,mu,";
  else if (ds.param_dim != 0)
    fail(ErrorCode::kInvalidConfig, "csv schema supports 0 or 2 parameter columns");
  for (int c = 0; c < ds.out_dim; ++c) {
    header += "u" + std::to_string(c + 1);
    if (c + 1 < ds.out_dim) header += ',';
  }
  out << header << '\n';

  char buf[32];
  for (int r = 0; r < ds.rows(); ++r) {
    std::string row;
    for (int c = 0; c < ds.X.cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.X(r, c));
      row += buf;
      row += ',';
    }
    for (int c = 0; c < ds.U.cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.U(r, c));
      row += buf;
      if (c + 1 < ds.U.cols) row += ',';
    }
    out << row << '\n';
  }
  if (!out) fail(ErrorCode::kIoError, "write failure on " + path);
}

}  // namespace ddnn
