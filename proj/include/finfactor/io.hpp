#pragma once

// JSON forms of matrices, unit systems, families and reports.
//
// Matrix file: {"dim": n, "entries": [[re, im], ...]} with exactly n^2 pairs
// in row-major order.

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "finfactor/compression.hpp"
#include "finfactor/matrix_core.hpp"
#include "finfactor/matrix_units.hpp"
#include "finfactor/sparsity.hpp"

namespace finfactor::io {

using json = nlohmann::ordered_json;

inline json matrix_to_json(const Matrix& x) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) entries.push_back({x(i, j).real(), x(i, j).imag()});
  return json{{"dim", x.rows()}, {"entries", std::move(entries)}};
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw Error(ErrorKind::ParseError, "matrix document needs \"dim\" and \"entries\"");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    throw Error(ErrorKind::ParseError, "\"dim\" must be a positive integer");
  }
  const auto n = static_cast<Eigen::Index>(j["dim"].get<long long>());
  if (n > dim_cap()) throw Error(ErrorKind::DimensionOverflow, "matrix dimension exceeds cap");
  const json& e = j["entries"];
  if (!e.is_array() || static_cast<Eigen::Index>(e.size()) != n * n) {
    throw Error(ErrorKind::ParseError, "\"entries\" must hold exactly dim^2 pairs");
  }
  Matrix x(n, n);
  for (Eigen::Index idx = 0; idx < n * n; ++idx) {
    const json& pair = e[static_cast<std::size_t>(idx)];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw Error(ErrorKind::ParseError, "entry " + std::to_string(idx) + " is not a [re, im] pair");
    }
    x(idx / n, idx % n) = Complex(pair[0].get<double>(), pair[1].get<double>());
  }
  if (!all_finite(x)) throw Error(ErrorKind::ParseError, "non-finite entry");
  return x;
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
}

inline Matrix load_matrix(const std::string& path) { return matrix_from_json(parse(read_file(path))); }

inline void save_matrix(const std::string& path, const Matrix& x) { write_file(path, matrix_to_json(x).dump(2) + "\n"); }

/// Bundle keyed "e_i_j" with 1-based indices.
inline json units_to_json(const MatrixUnitSystem& sys) {
  json j = json::object();
  for (int i = 0; i < sys.size(); ++i)
    for (int l = 0; l < sys.size(); ++l)
      j["e_" + std::to_string(i + 1) + "_" + std::to_string(l + 1)] = matrix_to_json(sys(i, l));
  return j;
}

inline MatrixUnitSystem units_from_json(const json& j) {
  if (!j.is_object() || j.empty()) throw Error(ErrorKind::ParseError, "unit bundle must be a non-empty object");
  int k = 0;
  while (j.contains("e_" + std::to_string(k + 1) + "_" + std::to_string(k + 1))) ++k;
  if (k == 0 || static_cast<int>(j.size()) != k * k) {
    throw Error(ErrorKind::ParseError, "unit bundle must hold keys e_i_j for 1 <= i, j <= k");
  }
  std::vector<Matrix> units;
  for (int i = 0; i < k; ++i)
    for (int l = 0; l < k; ++l) {
      const std::string key = "e_" + std::to_string(i + 1) + "_" + std::to_string(l + 1);
      if (!j.contains(key)) throw Error(ErrorKind::ParseError, "missing " + key);
      units.push_back(matrix_from_json(j[key]));
    }
  const Eigen::Index n = units.front().rows();
  return MatrixUnitSystem(n, k, std::move(units));
}

inline json family_to_json(const ProjectionFamily& fam) {
  json ps = json::array();
  for (const auto& p : fam.projections()) ps.push_back(matrix_to_json(p));
  return json{{"family_id", fam.id()}, {"k", fam.size()}, {"projections", std::move(ps)}};
}

inline json pattern_rows(const BlockPattern& p) {
  json rows = json::array();
  for (const auto& r : p.rows()) rows.push_back(r);
  return rows;
}

inline json sparsity_to_json(const SparsityReport& r) {
  json patterns = json::array();
  for (const auto& p : r.patterns) patterns.push_back(pattern_rows(p));
  return json{{"index_num", r.index.num()},
              {"index_den", r.index.den()},
              {"index", r.index.value()},
              {"k", r.k},
              {"labels", r.labels},
              {"patterns", std::move(patterns)},
              {"support_trace_num", r.support_trace.num()},
              {"support_trace_den", r.support_trace.den()},
              {"family_id", r.family_id},
              {"eta", r.eta}};
}

inline json unit_report_to_json(const UnitSystemReport& r) {
  return json{{"membership", r.membership},
              {"projection_residual", r.projection_residual},
              {"adjoint_residual", r.adjoint_residual},
              {"product_residual", r.product_residual},
              {"trace_spread", r.trace_spread},
              {"full", r.full},
              {"pass", r.pass}};
}

inline json pipeline_to_json(const PipelineReport& rep) {
  json stages = json::array();
  for (const auto& s : rep.stages) {
    stages.push_back(json{{"name", s.name},
                          {"bounds",
                           {{"c", s.c},
                            {"limit", s.limit},
                            {"support_trace_num", s.support_trace.num()},
                            {"support_trace_den", s.support_trace.den()}}},
                          {"algebra_dims", {{"before", s.dim_before}, {"after", s.dim_after}}},
                          {"ok", s.ok},
                          {"note", s.note}});
  }
  json out{{"ok", rep.ok}, {"stages", std::move(stages)}};
  if (rep.compression) {
    const auto& c = *rep.compression;
    out["compression"] = {{"k", c.k},
                          {"index_num", c.index.num()},
                          {"index_den", c.index.den()},
                          {"block_count", c.block_count},
                          {"norm_rescale", c.norm_rescale},
                          {"projection_residual", c.projection_residual}};
  }
  return out;
}

}  // namespace finfactor::io
