#pragma once

#include <json.hpp>

#include "eqmflow/state.hpp"

namespace eqmflow {

using Json = nlohmann::json;

// Doubles are written with round-trip precision, so a write/read cycle is
// bit-exact for finite values.

inline Json matrix_to_json(const Matrix& m) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json rr = Json::array(), ri = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return Json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_from_json(const Json& j, const std::string& where = "matrix") {
  auto bad = [&](const std::string& why) { fail(ErrorKind::Config, where + ": " + why); };
  if (!j.is_object()) bad("expected an object with \"re\" (and optionally \"im\", \"dim\")");
  if (!j.contains("re") || !j["re"].is_array()) bad("missing array \"re\"");
  const Json& re = j["re"];
  const auto n = static_cast<Eigen::Index>(re.size());
  if (n == 0) bad("empty matrix");
  if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"].get<Eigen::Index>() != n))
    bad("\"dim\" does not match the row count");
  const bool has_im = j.contains("im");
  if (has_im && (!j["im"].is_array() || static_cast<Eigen::Index>(j["im"].size()) != n))
    bad("\"im\" shape does not match \"re\"");
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!re[r].is_array() || static_cast<Eigen::Index>(re[r].size()) != n) bad("matrix must be square");
    if (has_im && (!j["im"][r].is_array() || static_cast<Eigen::Index>(j["im"][r].size()) != n))
      bad("\"im\" shape does not match \"re\"");
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!re[r][c].is_number()) bad("non-numeric entry in \"re\"");
      if (has_im && !j["im"][r][c].is_number()) bad("non-numeric entry in \"im\"");
      const double vi = has_im ? j["im"][r][c].get<double>() : 0.0;
      m(r, c) = Complex(re[r][c].get<double>(), vi);
    }
  }
  return m;
}

inline Json vector_to_json(const Vector& v) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return Json{{"dim", v.size()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline Vector vector_from_json(const Json& j, const std::string& where = "vector") {
  auto bad = [&](const std::string& why) { fail(ErrorKind::Config, where + ": " + why); };
  if (!j.is_object() || !j.contains("re") || !j["re"].is_array()) bad("expected an object with array \"re\"");
  const Json& re = j["re"];
  const auto n = static_cast<Eigen::Index>(re.size());
  if (n == 0) bad("empty vector");
  const bool has_im = j.contains("im");
  if (has_im && (!j["im"].is_array() || static_cast<Eigen::Index>(j["im"].size()) != n))
    bad("\"im\" length does not match \"re\"");
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!re[i].is_number() || (has_im && !j["im"][i].is_number())) bad("non-numeric entry");
    v(i) = Complex(re[i].get<double>(), has_im ? j["im"][i].get<double>() : 0.0);
  }
  return v;
}

inline Json real_vector_to_json(const RealVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline RealVector real_vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorKind::Config, where + ": expected an array of numbers");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ErrorKind::Config, where + ": non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Json to_json(const PureState& x) { return vector_to_json(x.vec()); }
inline Json to_json(const DensityMatrix& r) { return matrix_to_json(r.mat()); }

inline PureState pure_state_from_json(const Json& j, const std::string& where = "state") {
  return PureState(vector_from_json(j, where));
}

inline DensityMatrix density_from_json(const Json& j, const std::string& where = "state") {
  return DensityMatrix(matrix_from_json(j, where));
}

}  // namespace eqmflow
