#pragma once

// Property checks shared by the unit suites and the acceptance binary. Each
// returns a verdict with a short description of the first violation.

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "scinv/controllers.hpp"
#include "scinv/fail.hpp"
#include "scinv/geometry.hpp"
#include "scinv/invariance.hpp"
#include "support.hpp"

namespace scinv::test {

struct Verdict {
  bool ok = true;
  std::string detail;

  void fail(const std::string& what) {
    if (ok) detail = what;
    ok = false;
  }
};

inline FailOptions property_fail_options(std::uint64_t seed) {
  FailOptions o;
  o.max_iterations = 60;
  o.horizon = 15;
  o.certification_rollouts = 300;
  o.seed = seed;
  return o;
}

inline LearnState learn(const Case& c, const std::vector<ControllerSpec>& schedule, const FailOptions& o) {
  return run_fail(make_step_oracle(c.sys), c.Z, schedule, o);
}

/// FAIL runs on the random cases, computed once per binary.
inline const std::vector<LearnState>& random_case_runs() {
  static const std::vector<LearnState> runs = [] {
    std::vector<LearnState> out;
    for (const auto& c : random_cases()) out.push_back(learn(c, unit_schedule(), property_fail_options(c.seed)));
    return out;
  }();
  return runs;
}

/// Z_inf in P_l and P_l in P_{l-1} for every l.
inline Verdict check_monotone(const Case& c, const LearnState& s) {
  Verdict v;
  for (std::size_t l = 0; l < s.polytopes.size(); ++l) {
    if (!contains(s.polytopes[l], c.z_inf())) v.fail("Z_inf not inside P_" + std::to_string(l));
    if (l > 0 && !contains(s.polytopes[l - 1], s.polytopes[l])) {
      v.fail("P_" + std::to_string(l) + " not inside P_" + std::to_string(l - 1));
    }
  }
  return v;
}

/// Every learned row equals the normalized [A B] pullback of its projected row.
inline Verdict check_pullback(const Case& c, const LearnState& s, double tolerance = 1e-6) {
  Verdict v;
  const Eigen::MatrixXd ab_t = c.sys.AB().transpose();
  for (const auto& l : s.learned) {
    const Halfspace truth(ab_t * l.projected.row.normal, l.projected.row.offset);
    const double e = halfspace_distance(l.row, truth);
    if (!(e <= tolerance)) {
      std::ostringstream m;
      m << "learned row " << l.iteration << " deviates by " << e;
      v.fail(m.str());
    }
  }
  return v;
}

/// The failing pair of each learned row lies outside the polytope that row created.
inline Verdict check_failure_excluded(const LearnState& s) {
  Verdict v;
  for (const auto& l : s.learned) {
    const Polytope& p = s.polytopes.at(static_cast<std::size_t>(l.iteration));
    if (is_member(p, l.source.z, tol::kFeasibility)) v.fail("failure of row " + std::to_string(l.iteration) + " kept");
    if (!(l.row.residual(l.source.z) > 0.0)) v.fail("row " + std::to_string(l.iteration) + " does not cut its failure");
  }
  return v;
}

/// Sections grow along the learned sequence: U_Zinf(x) in U_Pl(x) in U_P(l-1)(x).
inline Verdict check_sections_nested(const Case& c, const LearnState& s, int samples, std::uint64_t seed) {
  Verdict v;
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = sample_uniform(c.x_inf(), rng);
    const auto inner = x_section(c.z_inf(), x);
    if (!inner) {
      v.fail("empty Z_inf section inside X_inf");
      continue;
    }
    std::optional<Polytope> prev;
    for (std::size_t l = s.polytopes.size(); l-- > 0;) {
      const auto sec = x_section(s.polytopes[l], x);
      if (!sec) {
        v.fail("empty section of P_" + std::to_string(l));
        break;
      }
      if (!contains(*sec, l + 1 == s.polytopes.size() ? *inner : *prev)) {
        v.fail("section of P_" + std::to_string(l) + " misses inputs");
      }
      prev = sec;
    }
  }
  return v;
}

/// Safe-controller closed loop from random x0 in X_inf never leaves X_inf.
inline Verdict check_safe_controller(const Case& c, int seeds, int steps) {
  Verdict v;
  const StepOracle oracle = make_step_oracle(c.sys);
  const Controller ctrl = safe_controller(c.z_inf(), c.sys.state_dim());
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const Eigen::VectorXd x0 = sample_uniform(c.x_inf(), rng);
    try {
      const Trajectory t = rollout(oracle, ctrl, x0, steps, c.x_inf());
      if (t.exited()) v.fail("seed " + std::to_string(seed) + " exits at step " + std::to_string(t.samples.back().k));
    } catch (const ControllerInfeasible& e) {
      v.fail("seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  return v;
}

/// Brute-force classifier for Pre: a grid of states, each tested against a
/// grid of inputs. A grid "yes" must be a Pre member; a Pre member the grid
/// misses must be reachable once the target is inflated by one input pitch.
inline Verdict check_pre_state_grid(const LtiSystem& sys, const Polytope& omega_x, double input_bound,
                                    const Eigen::VectorXd& half_width, int state_grid, int input_grid) {
  Verdict v;
  const Polytope pre = pre_state(sys, omega_x, Polytope::box(Eigen::VectorXd::Constant(1, input_bound)));
  const double pitch = 2.0 * input_bound / (input_grid - 1);
  const double slack = sys.B.norm() * pitch;
  Polytope inflated(omega_x.dim());
  for (const auto& r : omega_x.rows()) inflated.add(Halfspace(r.normal, r.offset + slack * r.normal.norm()));
  auto reachable = [&](const Eigen::VectorXd& x, const Polytope& target) {
    for (int j = 0; j < input_grid; ++j) {
      const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, -input_bound + pitch * j);
      if (is_member(target, sys.A * x + sys.B * u, 1e-9)) return true;
    }
    return false;
  };
  for (int i = 0; i < state_grid; ++i) {
    for (int k = 0; k < state_grid; ++k) {
      Eigen::VectorXd x(2);
      x << -half_width[0] + 2.0 * half_width[0] * i / (state_grid - 1),
          -half_width[1] + 2.0 * half_width[1] * k / (state_grid - 1);
      const bool in_pre = is_member(pre, x, 1e-7);
      const bool grid_yes = reachable(x, omega_x);
      std::ostringstream at;
      at << "(" << x[0] << ", " << x[1] << ")";
      if (grid_yes && !in_pre) v.fail("grid-reachable state " + at.str() + " missing from Pre");
      if (in_pre && !grid_yes && !reachable(x, inflated)) v.fail("Pre member " + at.str() + " beyond one grid pitch");
    }
  }
  return v;
}

}  // namespace scinv::test
