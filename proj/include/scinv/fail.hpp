#pragma once

// Failure-aware iterative learning of the maximal state-control invariant
// set. The learner sees the plant only through StepOracle and the
// trajectories it records; this header deliberately does not include the LTI
// model.

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scinv/controllers.hpp"
#include "scinv/dynamics/oracle.hpp"
#include "scinv/errors.hpp"
#include "scinv/geometry.hpp"
#include "scinv/sections.hpp"
#include "scinv/tolerances.hpp"

namespace scinv {

/// A row of X_{l-1} that a failing successor state violates.
struct ViolatedRow {
  int index = 0;
  Halfspace row;
  double residual = 0.0;
};

/// One-step failing pair: z in P_{l-1} whose successor leaves X_{l-1}.
struct FailureEvent {
  int iteration = 0;
  int trajectory = -1;
  int step = 0;
  Eigen::VectorXd z;
  Eigen::VectorXd x_next;
  std::vector<ViolatedRow> violated_rows;
};

/// p samples z(t_i) stacked as rows, with targets h_j . x(t_i + 1).
struct RegressorWindow {
  Eigen::MatrixXd regressors;
  Eigen::VectorXd targets;
  /// (trajectory index in the archive, step) for each row.
  std::vector<std::pair<int, int>> source_indices;
};

struct LearnedRow {
  /// Jointly normalized (a_hat, g).
  Halfspace row;
  /// Polytope version this row produced.
  int iteration = 0;
  FailureEvent source;
  /// The projected row whose predecessor this is.
  ViolatedRow projected;
  RegressorWindow window;
};

struct CertificationReport {
  int n_rollouts = 0;
  int horizon = 0;
  int violations = 0;
  /// Step index of the failing pair, one entry per violating rollout.
  std::vector<int> first_exit_steps;
  /// Rollouts that could not start or continue because a section was empty.
  int empty_sections = 0;
  /// Random rollouts give evidence, not proof.
  bool heuristic = true;
  std::vector<Trajectory> trajectories;

  bool passed() const { return violations == 0; }
};

struct LearnState {
  std::vector<Polytope> polytopes;
  std::vector<Polytope> projections;
  std::vector<LearnedRow> learned;
  /// Trajectories handed to the learner, in recording order.
  std::vector<Trajectory> trajectories;
  /// Archive indices of trajectories that exposed at least one failure.
  std::vector<int> failing_trajectories;
  std::vector<CertificationReport> certifications;
  std::uint64_t seed = 0;
  int rollouts_run = 0;
  bool certified = false;
  bool iteration_cap_reached = false;
  std::vector<std::string> log;

  int n_x() const { return projections.empty() ? 0 : projections.front().dim(); }
  /// Number of refinements so far; P_l is polytopes[l].
  int iteration() const { return static_cast<int>(polytopes.size()) - 1; }
  const Polytope& current() const { return polytopes.back(); }
  const Polytope& current_projection() const { return projections.back(); }
};

/// Every k with z(k) in P_prev and x_next(k) outside X_prev, together with the
/// rows of X_prev that x_next(k) violates.
inline std::vector<FailureEvent> detect_failures(const Trajectory& traj, const Polytope& p_prev,
                                                 const Polytope& x_prev, int iteration = 0,
                                                 int trajectory_id = -1) {
  std::vector<FailureEvent> events;
  for (const auto& s : traj.samples) {
    const Eigen::VectorXd z = s.z();
    if (z.size() != p_prev.dim() || s.x_next.size() != x_prev.dim()) {
      throw DimensionMismatch("detect_failures: trajectory does not match the polytopes");
    }
    if (!is_member(p_prev, z, tol::kFeasibility)) continue;
    std::vector<ViolatedRow> violated;
    for (std::size_t j = 0; j < x_prev.size(); ++j) {
      const Halfspace row = normalize(x_prev.row(j));
      const double r = row.residual(s.x_next);
      if (r > tol::kFeasibility) violated.push_back({static_cast<int>(j), row, r});
    }
    if (violated.empty()) continue;
    events.push_back({iteration, trajectory_id, s.k, z, s.x_next, std::move(violated)});
  }
  return events;
}

namespace detail {

inline bool full_rank_rows(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
  const auto& sv = svd.singularValues();
  const double largest = sv[0];
  return largest > 0.0 && sv[sv.size() - 1] > tol::kRank * largest;
}

}  // namespace detail

/// Greedy window: walks the archive from the most recent trajectory (and its
/// most recent sample) backwards, keeping each sample that raises the rank.
inline RegressorWindow build_window(const std::vector<Trajectory>& archive, const Halfspace& row) {
  int dim = 0;
  for (const auto& t : archive) {
    if (!t.samples.empty()) {
      dim = static_cast<int>(t.samples.front().z().size());
      break;
    }
  }
  if (dim == 0) throw InsufficientExcitation("build_window: archive holds no samples");

  RegressorWindow w;
  w.regressors.resize(0, dim);
  for (int ti = static_cast<int>(archive.size()) - 1; ti >= 0 && w.regressors.rows() < dim; --ti) {
    const auto& samples = archive[static_cast<std::size_t>(ti)].samples;
    for (int si = static_cast<int>(samples.size()) - 1; si >= 0 && w.regressors.rows() < dim; --si) {
      const auto& s = samples[static_cast<std::size_t>(si)];
      if (s.x_next.size() != row.dim()) throw DimensionMismatch("build_window: row does not match the state dimension");
      Eigen::MatrixXd trial(w.regressors.rows() + 1, dim);
      trial << w.regressors, s.z().transpose();
      // Rank must grow by one with every accepted row.
      if (!detail::full_rank_rows(trial)) continue;
      w.regressors = std::move(trial);
      w.targets.conservativeResize(w.regressors.rows());
      w.targets[w.regressors.rows() - 1] = row.normal.dot(s.x_next);
      w.source_indices.emplace_back(ti, s.k);
    }
  }
  if (w.regressors.rows() < dim) {
    throw InsufficientExcitation("build_window: archive reaches rank " + std::to_string(w.regressors.rows()) +
                                 " of " + std::to_string(dim));
  }
  return w;
}

/// Solves regressors * a = targets.
inline Eigen::VectorXd learn_normal(const RegressorWindow& w) {
  if (w.regressors.rows() != w.regressors.cols() || w.targets.size() != w.regressors.rows()) {
    throw DimensionMismatch("learn_normal: window must be square");
  }
  if (!detail::full_rank_rows(w.regressors)) throw InsufficientExcitation("learn_normal: window is rank deficient");
  const Eigen::VectorXd a = w.regressors.colPivHouseholderQr().solve(w.targets);
  const double residual = (w.regressors * a - w.targets).norm();
  if (residual > 1e-8 * std::max(1.0, w.targets.norm())) {
    throw ResidualTooLarge("learn_normal: residual " + std::to_string(residual) +
                           " is too large for deterministic linear data");
  }
  return a;
}

/// Outcome of one refinement attempt.
enum class RefineResult { added, duplicate };

/// P_l = P_{l-1} n { a_hat . z <= g_j } with g_j copied from the violated
/// projected row. A row that duplicates an existing one (within 1e-6) is
/// skipped and logged. Throws if the new row fails to cut off event.z.
inline RefineResult refine(LearnState& state, const FailureEvent& event, const ViolatedRow& violated,
                           const Eigen::VectorXd& a_hat, const RegressorWindow& window = {}) {
  const Polytope& cur = state.current();
  if (a_hat.size() != cur.dim()) throw DimensionMismatch("refine: learned normal has wrong dimension");
  const Halfspace learned = normalize(Halfspace(a_hat, violated.row.offset));
  for (const auto& r : cur.rows()) {
    if (halfspace_distance(r, learned) <= tol::kSetEquality) {
      state.log.push_back("iteration " + std::to_string(state.iteration()) + ": learned row for projected row " +
                          std::to_string(violated.index) + " duplicates an existing row, skipped");
      return RefineResult::duplicate;
    }
  }
  if (!(learned.residual(event.z) > 0.0)) {
    throw FailureNotExcluded("refine: learned row does not exclude the failing pair at step " +
                             std::to_string(event.step));
  }
  const int next = state.iteration() + 1;
  state.polytopes.push_back(intersect(cur, learned, RowLabel::learned(next)));
  state.projections.push_back(state_projection(state.polytopes.back(), state.n_x()));
  state.learned.push_back({learned, next, event, violated, window});
  return RefineResult::added;
}

namespace detail {

inline LearnState initial_learn_state(const Polytope& p0, int n_x, std::uint64_t seed) {
  LearnState state;
  state.seed = seed;
  state.polytopes.push_back(p0);
  state.projections.push_back(state_projection(p0, n_x));
  return state;
}

/// Feeds one trajectory to the learner: re-detects failures against each
/// refreshed polytope until none remain. Returns true when the trajectory
/// exposed at least one failure.
inline bool learn_from(LearnState& state, Trajectory traj, int max_iterations) {
  state.trajectories.push_back(std::move(traj));
  const int id = static_cast<int>(state.trajectories.size()) - 1;
  bool failed = false;
  while (state.iteration() < max_iterations) {
    const auto events = detect_failures(state.trajectories.back(), state.current(), state.current_projection(),
                                        state.iteration() + 1, id);
    if (events.empty()) break;
    failed = true;
    bool progressed = false;
    for (const auto& ev : events) {
      for (const auto& v : ev.violated_rows) {
        if (state.iteration() >= max_iterations) break;
        const RegressorWindow w = build_window(state.trajectories, v.row);
        const Eigen::VectorXd a_hat = learn_normal(w);
        if (refine(state, ev, v, a_hat, w) == RefineResult::added) progressed = true;
      }
    }
    if (!progressed) break;
  }
  if (failed) state.failing_trajectories.push_back(id);
  if (state.iteration() >= max_iterations) state.iteration_cap_reached = true;
  return failed;
}

}  // namespace detail

/// Random-admissible rollouts from uniform initial states in Pi_x(P). A
/// rollout that leaves Pi_x(P), or reaches a state with an empty section,
/// counts as a violation.
inline CertificationReport certify(const StepOracle& oracle, const Polytope& p, int n_rollouts, int horizon,
                                   Rng& rng, bool keep_trajectories = false) {
  CertificationReport report;
  report.n_rollouts = n_rollouts;
  report.horizon = horizon;
  const Polytope proj = state_projection(p, oracle.state_dim());
  auto engine = std::make_shared<Rng>(rng());
  const Controller ctrl = random_admissible_controller(engine);
  for (int i = 0; i < n_rollouts; ++i) {
    const Eigen::VectorXd x0 = sample_uniform(proj, *engine);
    try {
      Trajectory t = rollout(oracle, ctrl, x0, horizon, proj, &p);
      if (t.exited()) {
        ++report.violations;
        report.first_exit_steps.push_back(t.samples.back().k);
      }
      if (keep_trajectories) report.trajectories.push_back(std::move(t));
    } catch (const ControllerInfeasible&) {
      ++report.violations;
      ++report.empty_sections;
      report.first_exit_steps.push_back(-1);
    }
  }
  return report;
}

struct FailOptions {
  /// Hard cap on refinements (L).
  int max_iterations = 20;
  /// Trajectory length (T).
  int horizon = 15;
  /// Violation-free random rollouts required to stop.
  int certification_rollouts = 1200;
  std::uint64_t seed = 0;
};

/// The learning loop. Schedule entries before the trailing random entry run
/// once each (constant inputs from their x0, origin by default). A trailing
/// random entry then repeats: each iteration draws random-admissible
/// rollouts from the current projection until one fails, and stops once
/// `certification_rollouts` in a row stay inside.
inline LearnState run_fail(const StepOracle& oracle, const Polytope& p0, const std::vector<ControllerSpec>& schedule,
                           const FailOptions& opt) {
  const int n_x = oracle.state_dim();
  if (p0.dim() != n_x + oracle.input_dim()) throw DimensionMismatch("run_fail: P_0 is not in the joint space");
  if (!is_bounded(p0)) throw UnboundedPolytope("run_fail: P_0 must be bounded");
  if (opt.horizon <= 0 || opt.max_iterations < 0 || opt.certification_rollouts <= 0) {
    throw InvalidArgument("run_fail: horizon and rollout counts must be positive");
  }

  LearnState state = detail::initial_learn_state(p0, n_x, opt.seed);
  auto rng = std::make_shared<Rng>(opt.seed);
  const Controller random_ctrl = random_admissible_controller(rng);

  auto start_state = [&](const ControllerSpec& spec) -> Eigen::VectorXd {
    if (spec.x0) return *spec.x0;
    if (spec.kind == ControllerKind::constant) return Eigen::VectorXd::Zero(n_x);
    return sample_uniform(state.current_projection(), *rng);
  };

  const bool trailing_random = !schedule.empty() && schedule.back().kind == ControllerKind::random_admissible;
  const std::size_t fixed = trailing_random ? schedule.size() - 1 : schedule.size();

  for (std::size_t i = 0; i < fixed && state.iteration() < opt.max_iterations; ++i) {
    const ControllerSpec& spec = schedule[i];
    const Eigen::VectorXd x0 = start_state(spec);
    Trajectory t;
    if (spec.kind == ControllerKind::constant) {
      t = rollout(oracle, constant_controller(spec.value), x0, opt.horizon, state.current_projection());
    } else if (spec.kind == ControllerKind::random_admissible) {
      t = rollout(oracle, random_ctrl, x0, opt.horizon, state.current_projection(), &state.current());
    } else {
      throw InvalidArgument("run_fail: safe controllers cannot drive the learner");
    }
    ++state.rollouts_run;
    detail::learn_from(state, std::move(t), opt.max_iterations);
  }

  if (trailing_random) {
    // A failing rollout that teaches nothing new (all learned rows duplicate)
    // would otherwise repeat forever.
    constexpr int kMaxStalls = 100;
    int stalls = 0;
    while (state.iteration() < opt.max_iterations && stalls < kMaxStalls) {
      bool found = false;
      for (int r = 0; r < opt.certification_rollouts; ++r) {
        const Eigen::VectorXd x0 = start_state(schedule.back());
        Trajectory t = rollout(oracle, random_ctrl, x0, opt.horizon, state.current_projection(), &state.current());
        ++state.rollouts_run;
        if (detect_failures(t, state.current(), state.current_projection()).empty()) continue;
        const int before = state.iteration();
        detail::learn_from(state, std::move(t), opt.max_iterations);
        stalls = state.iteration() == before ? stalls + 1 : 0;
        found = true;
        break;
      }
      if (!found) {
        CertificationReport passed;
        passed.n_rollouts = opt.certification_rollouts;
        passed.horizon = opt.horizon;
        state.certified = true;
        state.certifications.push_back(std::move(passed));
        state.log.push_back("iteration " + std::to_string(state.iteration()) + ": " +
                            std::to_string(opt.certification_rollouts) +
                            " random rollouts stayed inside, certified (heuristic)");
        break;
      }
    }
    if (stalls >= kMaxStalls) state.log.push_back("stopped: failures keep reproducing already-learned rows");
  }
  if (!state.certified) {
    state.log.push_back("stopped at iteration " + std::to_string(state.iteration()) + " without certification");
  }
  return state;
}

}  // namespace scinv
