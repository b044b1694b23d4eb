#pragma once

// JSON and CSV encodings for polytopes and point lists.

#include <Eigen/Dense>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "scinv/errors.hpp"
#include "scinv/geometry/polytope.hpp"

namespace scinv {

using Json = nlohmann::ordered_json;

inline Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a numeric array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument("expected a numeric array");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

inline Json to_json(const Halfspace& h) {
  Json j;
  j["normal"] = to_json(h.normal);
  j["offset"] = h.offset;
  return j;
}

/// {dim, rows:[{normal, offset, label}]}
inline Json to_json(const Polytope& p) {
  Json j;
  j["dim"] = p.dim();
  j["rows"] = Json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    Json r = to_json(p.row(i));
    r["label"] = p.label(i).str();
    j["rows"].push_back(std::move(r));
  }
  return j;
}

inline Polytope polytope_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("rows")) {
    throw InvalidArgument("polytope JSON needs 'dim' and 'rows'");
  }
  const int d = j.at("dim").get<int>();
  Polytope p(d);
  for (const auto& r : j.at("rows")) {
    Halfspace h(vector_from_json(r.at("normal")), r.at("offset").get<double>());
    if (h.dim() != d) throw DimensionMismatch("polytope JSON row has wrong dimension");
    p.add(std::move(h), r.contains("label") ? RowLabel::parse(r.at("label").get<std::string>()) : RowLabel::initial());
  }
  return p;
}

inline Polytope read_polytope(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  return polytope_from_json(j);
}

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << j.dump(2) << '\n';
}

/// One point per line, with a header row.
inline void write_points_csv(std::ostream& out, const std::vector<Eigen::VectorXd>& pts,
                             const std::vector<std::string>& header) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  out << std::setprecision(17);
  for (const auto& p : pts) {
    for (Eigen::Index i = 0; i < p.size(); ++i) out << (i ? "," : "") << p[i];
    out << '\n';
  }
}

/// Column names x1..xn followed by u1..um.
inline std::vector<std::string> coordinate_names(int n_x, int n_u = 0) {
  std::vector<std::string> names;
  for (int i = 1; i <= n_x; ++i) names.push_back("x" + std::to_string(i));
  for (int i = 1; i <= n_u; ++i) names.push_back("u" + std::to_string(i));
  return names;
}

}  // namespace scinv
