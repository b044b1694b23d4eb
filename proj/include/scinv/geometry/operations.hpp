#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "scinv/errors.hpp"
#include "scinv/geometry/lp.hpp"
#include "scinv/geometry/polytope.hpp"
#include "scinv/tolerances.hpp"

namespace scinv {

namespace detail {

inline void require_nonempty(const Polytope& p, const char* what) {
  if (is_empty(p)) throw EmptyPolytope(std::string(what) + ": polytope is empty");
}

}  // namespace detail

/// Normalizes every row and drops each row implied by the rows that remain.
/// A row j survives when maximizing its normal over the other surviving rows
/// exceeds its offset by more than the redundancy tolerance.
inline Polytope remove_redundancy(const Polytope& p) {
  Polytope q = normalized(p);
  detail::require_nonempty(q, "remove_redundancy");

  std::vector<bool> keep(q.size(), true);
  const Eigen::Index d = q.dim();
  for (std::size_t j = 0; j < q.size(); ++j) {
    const Halfspace& row = q.row(j);
    Eigen::Index others = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (i != j && keep[i]) ++others;
    }
    // The relaxed copy of row j keeps the LP bounded along its own normal.
    Eigen::MatrixXd G(others + 1, d);
    Eigen::VectorXd g(others + 1);
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (i == j || !keep[i]) continue;
      G.row(r) = q.row(i).normal.transpose();
      g[r++] = q.row(i).offset;
    }
    G.row(r) = row.normal.transpose();
    g[r] = row.offset + 1.0;
    const LpResult res = lp_solve(row.normal, G, g, Sense::maximize);
    if (res.optimal() && res.optimum <= row.offset + tol::kRedundancy) keep[j] = false;
  }

  Polytope out(q.dim());
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (keep[j]) out.add(q.row(j), q.label(j));
  }
  return out;
}

/// True iff every row of p holds over all of q (up to tolerance).
inline bool contains(const Polytope& p, const Polytope& q, double tolerance = tol::kSetEquality) {
  if (p.dim() != q.dim()) throw DimensionMismatch("contains: polytope dimensions differ");
  detail::require_nonempty(q, "contains");
  const Eigen::MatrixXd G = q.normals();
  const Eigen::VectorXd g = q.offsets();
  for (const auto& raw : p.rows()) {
    if (raw.normal.norm() <= tol::kDegenerate) {
      if (raw.offset < -tolerance) return false;
      continue;
    }
    const Halfspace row = normalize(raw);
    const LpResult res = lp_solve(row.normal, G, g, Sense::maximize);
    if (!res.optimal()) return false;
    if (res.optimum > row.offset + tolerance) return false;
  }
  return true;
}

inline bool equal(const Polytope& p, const Polytope& q, double tolerance = tol::kSetEquality) {
  return contains(p, q, tolerance) && contains(q, p, tolerance);
}

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;
};

/// Center and radius of the largest inscribed ball. Radius 0 means the set
/// has no interior.
inline Ball chebyshev_center(const Polytope& p) {
  const Eigen::Index d = p.dim();
  const Eigen::Index m = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m + 1, d + 1);
  Eigen::VectorXd g(m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& r = p.row(static_cast<std::size_t>(i));
    G.row(i).head(d) = r.normal.transpose();
    G(i, d) = r.normal.norm();
    g[i] = r.offset;
  }
  G(m, d) = -1.0;
  g[m] = 0.0;
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(d + 1);
  objective[d] = 1.0;
  const LpResult res = lp_solve(objective, G, g, Sense::maximize);
  if (res.status == LpStatus::infeasible) throw EmptyPolytope("chebyshev_center: polytope is empty");
  if (res.status == LpStatus::unbounded) throw UnboundedPolytope("chebyshev_center: inscribed radius is unbounded");
  return {res.argument.head(d), std::max(0.0, res.argument[d])};
}

struct BoundingBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Axis-aligned bounding box from 2d LPs.
inline BoundingBox bounding_box(const Polytope& p) {
  const Eigen::Index d = p.dim();
  const Eigen::MatrixXd G = p.normals();
  const Eigen::VectorXd g = p.offsets();
  BoundingBox box{Eigen::VectorXd(d), Eigen::VectorXd(d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i);
    const LpResult hi = lp_solve(e, G, g, Sense::maximize);
    if (hi.status == LpStatus::infeasible) throw EmptyPolytope("bounding_box: polytope is empty");
    if (hi.status == LpStatus::unbounded) throw UnboundedPolytope("bounding_box: polytope is unbounded");
    const LpResult lo = lp_solve(e, G, g, Sense::minimize);
    if (lo.status == LpStatus::unbounded) throw UnboundedPolytope("bounding_box: polytope is unbounded");
    box.upper[i] = hi.optimum;
    box.lower[i] = lo.optimum;
  }
  return box;
}

inline bool is_bounded(const Polytope& p) {
  try {
    bounding_box(p);
    return true;
  } catch (const UnboundedPolytope&) {
    return false;
  }
}

}  // namespace scinv
