#pragma once

// The only view of the plant that the learner gets: a step function and the
// trajectories it produced.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "scinv/controllers.hpp"
#include "scinv/errors.hpp"
#include "scinv/geometry.hpp"
#include "scinv/sections.hpp"

namespace scinv {

/// Opaque successor map x+ = f(x, u).
class StepOracle {
 public:
  using Fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

  StepOracle(int n_x, int n_u, Fn fn) : n_x_(n_x), n_u_(n_u), fn_(std::move(fn)) {
    if (n_x <= 0 || n_u <= 0) throw InvalidArgument("step oracle dimensions must be positive");
  }

  int state_dim() const { return n_x_; }
  int input_dim() const { return n_u_; }

  Eigen::VectorXd next_state(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
    if (x.size() != n_x_ || u.size() != n_u_) throw DimensionMismatch("next_state: bad state or input dimension");
    return fn_(x, u);
  }

 private:
  int n_x_;
  int n_u_;
  Fn fn_;
};

struct TrajectorySample {
  int k = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  Eigen::VectorXd x_next;

  Eigen::VectorXd z() const {
    Eigen::VectorXd v(x.size() + u.size());
    v << x, u;
    return v;
  }
};

enum class Termination { guard_exit, horizon };

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Termination terminated_by = Termination::horizon;

  bool exited() const { return terminated_by == Termination::guard_exit; }
  std::size_t size() const { return samples.size(); }
};

/// Runs `controller` from x0 for at most `horizon` steps. Stops after the
/// first step whose successor leaves `guard`; that failing pair is recorded.
/// Controllers that use sections get x_section(admissible, x), where
/// `admissible` is the joint state-input polytope.
inline Trajectory rollout(const StepOracle& oracle, const Controller& controller, const Eigen::VectorXd& x0,
                          int horizon, const Polytope& guard, const Polytope* admissible = nullptr) {
  if (x0.size() != oracle.state_dim()) throw DimensionMismatch("rollout: x0 has wrong dimension");
  if (guard.dim() != oracle.state_dim()) throw DimensionMismatch("rollout: guard has wrong dimension");
  if (!is_member(guard, x0)) throw InvalidArgument("rollout: x0 is outside the guard");
  if (controller.uses_section() && admissible == nullptr) {
    throw InvalidArgument("rollout: controller needs an admissible state-input polytope");
  }

  Trajectory traj;
  Eigen::VectorXd x = x0;
  for (int k = 0; k < horizon; ++k) {
    Eigen::VectorXd u;
    if (controller.uses_section()) {
      const auto section = x_section(*admissible, x);
      if (!section) throw ControllerInfeasible("rollout: empty admissible input set at step " + std::to_string(k));
      u = controller(x, &*section);
    } else {
      u = controller(x, nullptr);
    }
    if (u.size() != oracle.input_dim()) throw DimensionMismatch("rollout: controller returned wrong input size");
    Eigen::VectorXd next = oracle.next_state(x, u);
    traj.samples.push_back({k, x, u, next});
    if (!is_member(guard, next)) {
      traj.terminated_by = Termination::guard_exit;
      return traj;
    }
    x = std::move(next);
  }
  traj.terminated_by = Termination::horizon;
  return traj;
}

/// k, x..., u..., x_next..., failing. The failing flag marks the final pair of
/// a trajectory that exited its guard.
inline void write_trajectory_csv_header(std::ostream& out, int n_x, int n_u, bool with_id) {
  if (with_id) out << "trajectory,";
  out << "k";
  for (int i = 1; i <= n_x; ++i) out << ",x" << i;
  for (int i = 1; i <= n_u; ++i) out << ",u" << i;
  for (int i = 1; i <= n_x; ++i) out << ",x_next" << i;
  out << ",failing\n";
}

inline void write_trajectory_csv_rows(std::ostream& out, const Trajectory& t, std::optional<int> id = std::nullopt) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const auto& s = t.samples[i];
    if (id) out << *id << ',';
    out << s.k;
    for (Eigen::Index j = 0; j < s.x.size(); ++j) out << ',' << s.x[j];
    for (Eigen::Index j = 0; j < s.u.size(); ++j) out << ',' << s.u[j];
    for (Eigen::Index j = 0; j < s.x_next.size(); ++j) out << ',' << s.x_next[j];
    const bool failing = t.exited() && i + 1 == t.samples.size();
    out << ',' << (failing ? 1 : 0) << '\n';
  }
  out.precision(old);
}

}  // namespace scinv
