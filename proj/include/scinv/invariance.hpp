#pragma once

// Model-based ground truth: predecessor operators and the fixed-point
// recursions for the maximal control invariant set (state space) and the
// maximal state-control invariant set (joint space).

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "scinv/dynamics/lti.hpp"
#include "scinv/errors.hpp"
#include "scinv/geometry.hpp"
#include "scinv/sections.hpp"

namespace scinv {

inline constexpr int kRecursionCap = 100;

struct RecursionTrace {
  /// Omega_0, Omega_1, ..., each normalized and irredundant.
  std::vector<Polytope> iterates;
  /// Iterations that produced a strictly smaller set. The final equality
  /// check is not counted.
  int iterations_to_fixpoint = 0;

  const Polytope& fixpoint() const { return iterates.back(); }
};

/// { z : H_proj [A B] z <= g_proj } where Pi_x(omega) = { H_proj x <= g_proj }.
/// Row j is the pullback of projection row j; its label records the index.
inline Polytope pre_z(const LtiSystem& sys, const Polytope& omega, int iteration = 0) {
  const int n_x = sys.state_dim();
  if (omega.dim() != n_x + sys.input_dim()) throw DimensionMismatch("pre_z: polytope is not in the joint space");
  const Polytope proj = state_projection(omega, n_x);
  const Eigen::MatrixXd ab_t = sys.AB().transpose();
  Polytope out(omega.dim());
  for (std::size_t j = 0; j < proj.size(); ++j) {
    Halfspace pulled(ab_t * proj.row(j).normal, proj.row(j).offset);
    if (pulled.normal.norm() <= tol::kDegenerate) {
      if (pulled.offset < -tol::kFeasibility) throw EmptyPolytope("pre_z: predecessor is empty");
      continue;
    }
    out.add(normalize(pulled), RowLabel::recursion(iteration, static_cast<int>(j)));
  }
  return out;
}

/// { y : y_0 <= -1, -y_0 <= -1 }, the representation returned for empty
/// results.
inline Polytope empty_polytope(int dim) {
  Polytope p(dim);
  const Eigen::VectorXd e = Eigen::VectorXd::Unit(dim, 0);
  p.add(Halfspace(e, -1.0), RowLabel{RowLabel::Origin::derived, 0, -1});
  p.add(Halfspace(-e, -1.0), RowLabel{RowLabel::Origin::derived, 0, -1});
  return p;
}

/// Pre(omega_x) = { x : exists u in U with A x + B u in omega_x }. An empty
/// predecessor comes back as empty_polytope(n_x).
inline Polytope pre_state(const LtiSystem& sys, const Polytope& omega_x, const Polytope& input_set,
                          int iteration = 0) {
  const int n_x = sys.state_dim();
  const int n_u = sys.input_dim();
  if (omega_x.dim() != n_x || input_set.dim() != n_u) throw DimensionMismatch("pre_state: dimension mismatch");
  const Eigen::MatrixXd ab_t = sys.AB().transpose();
  Polytope lifted(n_x + n_u);
  for (const auto& r : omega_x.rows()) {
    lifted.add(Halfspace(ab_t * r.normal, r.offset), RowLabel::recursion(iteration));
  }
  for (const auto& r : input_set.rows()) {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(n_x + n_u);
    n.tail(n_u) = r.normal;
    lifted.add(Halfspace(n, r.offset), RowLabel::recursion(iteration));
  }
  if (is_empty(lifted)) return empty_polytope(n_x);
  return state_projection(lifted, n_x);
}

namespace detail {

template <typename Pre>
RecursionTrace fixed_point(const Polytope& start, Pre&& pre, int cap) {
  RecursionTrace trace;
  trace.iterates.push_back(remove_redundancy(start));
  for (int k = 0; k < cap; ++k) {
    const Polytope& cur = trace.iterates.back();
    Polytope next = remove_redundancy(intersect(cur, pre(cur, k + 1)));
    if (equal(next, cur, tol::kSetEquality)) return trace;
    trace.iterates.push_back(std::move(next));
    ++trace.iterations_to_fixpoint;
  }
  throw NonConvergence("recursion did not reach a fixed point in " + std::to_string(cap) + " iterations");
}

}  // namespace detail

/// Omega_{k+1} = Pre(Omega_k) n Omega_k from Omega_0 = X.
inline RecursionTrace compute_mci(const LtiSystem& sys, const Polytope& state_set, const Polytope& input_set,
                                  int cap = kRecursionCap) {
  if (state_set.dim() != sys.state_dim() || input_set.dim() != sys.input_dim()) {
    throw DimensionMismatch("compute_mci: constraint dimensions do not match the system");
  }
  return detail::fixed_point(
      state_set, [&](const Polytope& cur, int k) { return pre_state(sys, cur, input_set, k); }, cap);
}

/// Omega_{k+1} = Pre_z(Omega_k) n Omega_k from Omega_0 = Z.
inline RecursionTrace compute_msci(const LtiSystem& sys, const Polytope& joint_set, int cap = kRecursionCap) {
  if (joint_set.dim() != sys.state_dim() + sys.input_dim()) {
    throw DimensionMismatch("compute_msci: constraint set is not in the joint space");
  }
  return detail::fixed_point(joint_set, [&](const Polytope& cur, int k) { return pre_z(sys, cur, k); }, cap);
}

inline bool is_state_control_invariant(const LtiSystem& sys, const Polytope& c) {
  return contains(pre_z(sys, c), c, tol::kSetEquality);
}

/// Control invariance of a state-space set under inputs from input_set.
inline bool is_control_invariant(const LtiSystem& sys, const Polytope& c, const Polytope& input_set) {
  return contains(pre_state(sys, c, input_set), c, tol::kSetEquality);
}

}  // namespace scinv
