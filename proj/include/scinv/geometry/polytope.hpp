#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "scinv/errors.hpp"
#include "scinv/tolerances.hpp"

namespace scinv {

/// { y : normal . y <= offset }
struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;

  Halfspace() = default;
  Halfspace(Eigen::VectorXd n, double o) : normal(std::move(n)), offset(o) {}

  int dim() const { return static_cast<int>(normal.size()); }
  double residual(const Eigen::VectorXd& y) const { return normal.dot(y) - offset; }
};

/// Rescales the normal to unit length. The represented set does not change.
inline Halfspace normalize(const Halfspace& h) {
  const double n = h.normal.norm();
  if (!(n > tol::kDegenerate)) {
    throw DegenerateNormal("halfspace normal has norm " + std::to_string(n));
  }
  return {h.normal / n, h.offset / n};
}

/// Componentwise comparison of two halfspaces after normalization.
inline double halfspace_distance(const Halfspace& a, const Halfspace& b) {
  const Halfspace na = normalize(a);
  const Halfspace nb = normalize(b);
  if (na.dim() != nb.dim()) throw DimensionMismatch("halfspace_distance: dimensions differ");
  return std::max((na.normal - nb.normal).cwiseAbs().maxCoeff(), std::abs(na.offset - nb.offset));
}

inline bool halfspaces_match(const Halfspace& a, const Halfspace& b,
                             double tolerance = tol::kHalfspaceMatch) {
  return halfspace_distance(a, b) <= tolerance;
}

/// Where a row of a polytope came from.
struct RowLabel {
  enum class Origin { initial, recursion, learned, derived };
  Origin origin = Origin::initial;
  int iteration = 0;
  /// Index of the row this one was built from (projection row for predecessor
  /// rows), or -1.
  int source_row = -1;

  static RowLabel initial() { return {}; }
  static RowLabel recursion(int k, int source = -1) { return {Origin::recursion, k, source}; }
  static RowLabel learned(int l) { return {Origin::learned, l, -1}; }

  std::string str() const {
    switch (origin) {
      case Origin::initial:
        return "initial";
      case Origin::recursion:
        return "recursion:" + std::to_string(iteration);
      case Origin::learned:
        return "learned:" + std::to_string(iteration);
      case Origin::derived:
        return "derived:" + std::to_string(iteration);
    }
    return "initial";
  }

  static RowLabel parse(const std::string& s) {
    const auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    const int it = colon == std::string::npos ? 0 : std::stoi(s.substr(colon + 1));
    if (head == "initial") return {Origin::initial, it, -1};
    if (head == "recursion") return {Origin::recursion, it, -1};
    if (head == "learned") return {Origin::learned, it, -1};
    if (head == "derived") return {Origin::derived, it, -1};
    throw InvalidArgument("unknown row label '" + s + "'");
  }

  friend bool operator==(const RowLabel&, const RowLabel&) = default;
};

/// Polytope in H-representation. Rows keep their insertion order; nothing is
/// normalized or pruned implicitly.
class Polytope {
 public:
  Polytope() = default;
  explicit Polytope(int dim) : dim_(dim) {
    if (dim <= 0) throw InvalidArgument("polytope dimension must be positive");
  }

  Polytope(int dim, std::vector<Halfspace> rows, std::vector<RowLabel> labels = {})
      : dim_(dim), rows_(std::move(rows)), labels_(std::move(labels)) {
    if (dim <= 0) throw InvalidArgument("polytope dimension must be positive");
    if (labels_.empty()) labels_.assign(rows_.size(), RowLabel::initial());
    if (labels_.size() != rows_.size()) throw InvalidArgument("one label per row required");
    for (const auto& r : rows_) {
      if (r.dim() != dim_) throw DimensionMismatch("halfspace dimension differs from polytope dimension");
    }
  }

  /// { y : lower <= y <= upper }
  static Polytope box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    if (lower.size() != upper.size()) throw DimensionMismatch("box bounds differ in size");
    const int d = static_cast<int>(lower.size());
    Polytope p(d);
    for (int i = 0; i < d; ++i) {
      if (!(lower[i] <= upper[i])) throw InvalidArgument("box lower bound exceeds upper bound");
      Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i);
      p.add(Halfspace(e, upper[i]));
      p.add(Halfspace(-e, -lower[i]));
    }
    return p;
  }

  /// Symmetric box |y_i| <= r_i.
  static Polytope box(const Eigen::VectorXd& radius) { return box(-radius, radius); }

  int dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }
  bool no_rows() const { return rows_.empty(); }

  const std::vector<Halfspace>& rows() const { return rows_; }
  const std::vector<RowLabel>& labels() const { return labels_; }
  const Halfspace& row(std::size_t i) const { return rows_.at(i); }
  const RowLabel& label(std::size_t i) const { return labels_.at(i); }

  void add(Halfspace h, RowLabel label = RowLabel::initial()) {
    if (h.dim() != dim_) throw DimensionMismatch("halfspace dimension differs from polytope dimension");
    rows_.push_back(std::move(h));
    labels_.push_back(label);
  }

  Eigen::MatrixXd normals() const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows_.size()), dim_);
    for (std::size_t i = 0; i < rows_.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows_[i].normal.transpose();
    return m;
  }

  Eigen::VectorXd offsets() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t i = 0; i < rows_.size(); ++i) v[static_cast<Eigen::Index>(i)] = rows_[i].offset;
    return v;
  }

 private:
  int dim_ = 0;
  std::vector<Halfspace> rows_;
  std::vector<RowLabel> labels_;
};

inline void check_dim(const Polytope& p, const Eigen::VectorXd& y, const char* what) {
  if (y.size() != p.dim()) {
    throw DimensionMismatch(std::string(what) + ": point has dimension " + std::to_string(y.size()) +
                            ", polytope has " + std::to_string(p.dim()));
  }
}

/// True iff every row satisfies normal . y <= offset + tolerance.
inline bool is_member(const Polytope& p, const Eigen::VectorXd& y, double tolerance = tol::kFeasibility) {
  check_dim(p, y, "is_member");
  for (const auto& r : p.rows()) {
    if (r.residual(y) > tolerance) return false;
  }
  return true;
}

/// Largest row residual (positive means outside).
inline double max_violation(const Polytope& p, const Eigen::VectorXd& y) {
  check_dim(p, y, "max_violation");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : p.rows()) worst = std::max(worst, r.residual(y));
  return worst;
}

/// Copy of p with every row normalized. Zero rows that hold trivially are
/// dropped; a zero row with negative offset makes the set empty.
inline Polytope normalized(const Polytope& p) {
  Polytope out(p.dim());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& r = p.row(i);
    if (r.normal.norm() <= tol::kDegenerate) {
      if (r.offset < -tol::kFeasibility) throw EmptyPolytope("row 0 . y <= " + std::to_string(r.offset) + " is infeasible");
      continue;
    }
    out.add(normalize(r), p.label(i));
  }
  return out;
}

/// Appends the normalized halfspace. No pruning happens here so learned rows
/// remain identifiable.
inline Polytope intersect(const Polytope& p, const Halfspace& h, RowLabel label = RowLabel::initial()) {
  if (h.dim() != p.dim()) throw DimensionMismatch("intersect: halfspace dimension differs from polytope dimension");
  Polytope out = p;
  out.add(normalize(h), label);
  return out;
}

/// Row-list union of two polytopes of equal dimension.
inline Polytope intersect(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("intersect: polytope dimensions differ");
  Polytope out = p;
  for (std::size_t i = 0; i < q.size(); ++i) out.add(q.row(i), q.label(i));
  return out;
}

}  // namespace scinv
