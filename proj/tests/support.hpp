#pragma once

// Fixtures and independent oracles shared by the test binaries.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "scinv/controllers.hpp"
#include "scinv/dynamics/lti.hpp"
#include "scinv/fail.hpp"
#include "scinv/geometry.hpp"
#include "scinv/invariance.hpp"

namespace scinv::test {

struct Case {
  LtiSystem sys;
  Polytope X;
  Polytope U;
  Polytope Z;
  RecursionTrace msci;
  RecursionTrace mci;
  std::uint64_t seed = 0;

  const Polytope& z_inf() const { return msci.fixpoint(); }
  const Polytope& x_inf() const { return mci.fixpoint(); }
};

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline LtiSystem double_integrator_system() {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 0, 1;
  Eigen::MatrixXd b(2, 1);
  b << 0, 1;
  return LtiSystem(a, b);
}

inline Polytope di_state_box() { return Polytope::box(vec({15, 10})); }
inline Polytope di_input_box() { return Polytope::box(vec({5})); }

/// Computed once per binary.
inline const Case& double_integrator() {
  static const Case c = [] {
    LtiSystem sys = double_integrator_system();
    Polytope x = di_state_box();
    Polytope u = di_input_box();
    Polytope z = make_joint_constraints(x, u);
    RecursionTrace ms = compute_msci(sys, z);
    RecursionTrace m = compute_mci(sys, x, u);
    return Case{std::move(sys), std::move(x), std::move(u), std::move(z), std::move(ms), std::move(m), 0};
  }();
  return c;
}

inline std::vector<ControllerSpec> di_schedule() {
  return {{ControllerKind::constant, vec({-5}), vec({0, 0})},
          {ControllerKind::constant, vec({5}), vec({0, 0})},
          {ControllerKind::random_admissible, Eigen::VectorXd(), std::nullopt}};
}

inline bool inside_box(const Eigen::VectorXd& x, const Eigen::VectorXd& r) {
  return (x.array().abs() < r.array()).all();
}

/// Recursions that need more refinements are usually not finitely determined
/// and grow without bound; such draws are rejected.
inline constexpr int kRandomIterationCap = 15;

/// A controllable 2-state, 1-input system with |u| <= 1 and a state box wide
/// enough that constant inputs from the origin give three samples before any
/// exit. Returns nullopt when the draw is rejected: the recursions must reach
/// a fixed point after at least one refinement, with a full-dimensional,
/// moderately sized result.
inline std::optional<Case> try_random_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(-1.3, 1.3);
  std::uniform_real_distribution<double> ub(-1.0, 1.0);
  std::uniform_real_distribution<double> ur(4.0, 12.0);
  Eigen::MatrixXd a(2, 2);
  a << ua(rng), ua(rng), ua(rng), ua(rng);
  Eigen::MatrixXd b(2, 1);
  b << ub(rng), ub(rng);
  if (b.norm() < 0.3) return std::nullopt;
  Eigen::MatrixXd ctrb(2, 2);
  ctrb << b, a * b;
  if (std::abs(ctrb.determinant()) < 0.1) return std::nullopt;
  const Eigen::VectorXd r = vec({ur(rng), ur(rng)});
  for (double u : {-1.0, 1.0}) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    for (int k = 0; k < 3; ++k) {
      x = a * x + b * u;
      if (!inside_box(x, r)) return std::nullopt;
    }
  }
  LtiSystem sys(a, b);
  Polytope xs = Polytope::box(r);
  Polytope us = Polytope::box(vec({1}));
  Polytope z = make_joint_constraints(xs, us, [](std::string_view) {});
  try {
    RecursionTrace ms = compute_msci(sys, z, kRandomIterationCap);
    if (ms.iterations_to_fixpoint < 1 || ms.fixpoint().size() > 30) return std::nullopt;
    if (chebyshev_center(ms.fixpoint()).radius < 1e-2) return std::nullopt;
    RecursionTrace m = compute_mci(sys, xs, us, kRandomIterationCap);
    return Case{std::move(sys), std::move(xs), std::move(us), std::move(z), std::move(ms), std::move(m), seed};
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline constexpr int kRandomCases = 20;
inline constexpr std::uint64_t kRandomBaseSeed = 1000;

/// The first kRandomCases accepted draws from seeds kRandomBaseSeed, +1, ...
inline const std::vector<Case>& random_cases() {
  static const std::vector<Case> cases = [] {
    std::vector<Case> out;
    for (std::uint64_t s = kRandomBaseSeed; static_cast<int>(out.size()) < kRandomCases; ++s) {
      if (auto c = try_random_case(s)) out.push_back(std::move(*c));
    }
    return out;
  }();
  return cases;
}

inline std::vector<ControllerSpec> unit_schedule() {
  return {{ControllerKind::constant, vec({-1}), vec({0, 0})},
          {ControllerKind::constant, vec({1}), vec({0, 0})},
          {ControllerKind::random_admissible, Eigen::VectorXd(), std::nullopt}};
}

/// Feasibility of keeping x(1..horizon) in X with inputs in U, starting from a
/// fixed pair z = (x0, u0). Exact LP oracle over the input sequence.
inline bool viable(const LtiSystem& sys, const Polytope& x_set, const Polytope& u_set, const Eigen::VectorXd& z,
                   int horizon) {
  const int n_x = sys.state_dim();
  const int n_u = sys.input_dim();
  const int n_var = n_u * (horizon - 1);
  // x(k) = A^k x0 + sum_{i<k} A^{k-1-i} B u(i), u(0) fixed.
  std::vector<Eigen::MatrixXd> a_pow(static_cast<std::size_t>(horizon + 1));
  a_pow[0] = Eigen::MatrixXd::Identity(n_x, n_x);
  for (int k = 1; k <= horizon; ++k) a_pow[static_cast<std::size_t>(k)] = sys.A * a_pow[static_cast<std::size_t>(k - 1)];
  const Eigen::VectorXd x0 = z.head(n_x);
  const Eigen::VectorXd u0 = z.tail(n_u);

  const auto rows = static_cast<Eigen::Index>(horizon * x_set.size() + (horizon - 1) * u_set.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(rows, std::max(n_var, 1));
  Eigen::VectorXd h(rows);
  Eigen::Index r = 0;
  for (int k = 1; k <= horizon; ++k) {
    const Eigen::VectorXd free = a_pow[static_cast<std::size_t>(k)] * x0 +
                                 a_pow[static_cast<std::size_t>(k - 1)] * sys.B * u0;
    for (const auto& row : x_set.rows()) {
      for (int i = 1; i < k; ++i) {
        g.block(r, (i - 1) * n_u, 1, n_u) =
            (row.normal.transpose() * a_pow[static_cast<std::size_t>(k - 1 - i)] * sys.B);
      }
      h[r++] = row.offset - row.normal.dot(free);
    }
  }
  for (int i = 1; i < horizon; ++i) {
    for (const auto& row : u_set.rows()) {
      g.block(r, (i - 1) * n_u, 1, n_u) = row.normal.transpose();
      h[r++] = row.offset;
    }
  }
  return is_feasible(g, h);
}

}  // namespace scinv::test
