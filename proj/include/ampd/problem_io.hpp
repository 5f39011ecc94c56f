#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ampd/problem.hpp"

namespace ampd {

namespace detail {

// Accepts a flat row-major array of rows*cols numbers or an array of rows.
inline Matrix json_matrix(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  Matrix out(rows, cols);
  if (!j.is_array()) throw PreconditionError(std::string(what) + ": expected an array");
  if (rows * cols == 0) return out;
  if (!j.empty() && j.front().is_array()) {
    if (static_cast<Eigen::Index>(j.size()) != rows) throw DimensionError(std::string(what) + ": wrong row count");
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& row = j[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(row.size()) != cols)
        throw DimensionError(std::string(what) + ": wrong column count");
      for (Eigen::Index k = 0; k < cols; ++k) out(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return out;
  }
  if (static_cast<Eigen::Index>(j.size()) != rows * cols)
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows * cols) + " entries");
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) out(i, k) = j[static_cast<std::size_t>(i * cols + k)].get<double>();
  return out;
}

inline Vector json_vector(const nlohmann::json& j, Eigen::Index size, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
    throw DimensionError(std::string(what) + ": expected " + std::to_string(size) + " entries");
  Vector out(size);
  for (Eigen::Index i = 0; i < size; ++i) out[i] = j[static_cast<std::size_t>(i)].get<double>();
  return out;
}

inline nlohmann::json flat(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) out.push_back(m(i, k));
  return out;
}

inline nlohmann::json flat(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace detail

/// Parses the quadratic problem format
/// {"name","n","m","r","objectives":[{"Q","c","d","mu","lip"}],"A","b"}.
/// Q must be symmetric to 1e-12.
inline Problem quadratic_problem_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<Eigen::Index>();
    const auto m = j.at("m").get<Eigen::Index>();
    const auto r = j.at("r").get<Eigen::Index>();
    const auto& objs = j.at("objectives");
    if (n < 1 || m < 1 || r < 0) throw PreconditionError("quadratic json: need n >= 1, m >= 1, r >= 0");
    if (static_cast<Eigen::Index>(objs.size()) != m) throw DimensionError("quadratic json: objectives.size() != m");

    QuadraticModel model;
    std::vector<double> mus, lips;
    for (const auto& o : objs) {
      Matrix q = detail::json_matrix(o.at("Q"), n, n, "Q");
      if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw PreconditionError("quadratic json: Q is not symmetric to 1e-12");
      model.q.push_back(std::move(q));
      model.c.push_back(detail::json_vector(o.at("c"), n, "c"));
      model.d.push_back(o.value("d", 0.0));
      mus.push_back(o.at("mu").get<double>());
      lips.push_back(o.at("lip").get<double>());
    }
    Matrix a = detail::json_matrix(j.at("A"), r, n, "A");
    Vector b = detail::json_vector(j.at("b"), r, "b");
    return make_quadratic_problem(j.value("name", std::string("json")), model, mus, lips, std::move(a),
                                  std::move(b));
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("quadratic json: ") + e.what());
  }
}

inline Problem load_quadratic_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(path + ": " + e.what());
  }
  return quadratic_problem_from_json(j);
}

/// Inverse of quadratic_problem_from_json; requires an attached QuadraticModel.
inline nlohmann::json quadratic_problem_to_json(const Problem& p) {
  if (!p.quadratic()) throw PreconditionError("problem has no quadratic model attached");
  const QuadraticModel& qm = *p.quadratic();
  nlohmann::json j;
  j["name"] = p.name();
  j["n"] = p.n();
  j["m"] = p.m();
  j["r"] = p.r();
  j["objectives"] = nlohmann::json::array();
  for (std::size_t k = 0; k < qm.q.size(); ++k) {
    j["objectives"].push_back({{"Q", detail::flat(qm.q[k])},
                               {"c", detail::flat(qm.c[k])},
                               {"d", qm.d[k]},
                               {"mu", p.objectives()[k].mu},
                               {"lip", p.objectives()[k].lip}});
  }
  j["A"] = detail::flat(p.constraint().matrix());
  j["b"] = detail::flat(p.constraint().rhs());
  return j;
}

}  // namespace ampd
