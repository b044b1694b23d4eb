#pragma once

// State projection and x-sections of polytopes in the joint (x, u) space.
// Nothing here depends on a dynamics model.

#include <Eigen/Dense>

#include <numeric>
#include <optional>
#include <vector>

#include "scinv/errors.hpp"
#include "scinv/geometry.hpp"

namespace scinv {

/// Pi_x(Z): the states for which some input pairs into Z. Rows are normalized
/// and irredundant.
inline Polytope state_projection(const Polytope& z, int n_x) {
  if (n_x <= 0 || n_x >= z.dim()) throw InvalidArgument("state_projection: need 0 < n_x < dim(Z)");
  std::vector<int> keep(static_cast<std::size_t>(n_x));
  std::iota(keep.begin(), keep.end(), 0);
  return project_eliminate(z, keep);
}

/// U_Z(x) = { u : H_zu u <= h_z - H_zx x }. Rows with no input dependence
/// are checked and dropped. Returns nullopt when the section is empty.
///
/// States that sit on the boundary of Pi_x(Z) within `tolerance` get the
/// section with offsets relaxed by `tolerance` rather than an empty result.
inline std::optional<Polytope> x_section(const Polytope& z, const Eigen::VectorXd& x,
                                         double tolerance = tol::kFeasibility) {
  const int n_x = static_cast<int>(x.size());
  const int n_u = z.dim() - n_x;
  if (n_u <= 0) throw DimensionMismatch("x_section: state dimension must be smaller than dim(Z)");
  Polytope section(n_u);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Halfspace& r = z.row(i);
    const Eigen::VectorXd nu = r.normal.tail(n_u);
    const double rhs = r.offset - r.normal.head(n_x).dot(x);
    if (nu.cwiseAbs().maxCoeff() <= tol::kDegenerate) {
      if (rhs < -tolerance) return std::nullopt;
      continue;
    }
    section.add(Halfspace(nu, rhs), z.label(i));
  }
  if (!is_empty(section)) return section;
  Polytope relaxed(n_u);
  for (std::size_t i = 0; i < section.size(); ++i) {
    const Halfspace& r = section.row(i);
    relaxed.add(Halfspace(r.normal, r.offset + tolerance * r.normal.norm()), section.label(i));
  }
  if (!is_empty(relaxed)) return relaxed;
  return std::nullopt;
}

}  // namespace scinv
