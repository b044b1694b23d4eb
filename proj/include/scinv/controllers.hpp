#pragma once

// Controller families: constant input, uniform random draw from the current
// admissible section, and the Chebyshev center of a reference set's section.
// A controller receives the state and the caller's current section; it never
// owns the learner's polytope.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "scinv/errors.hpp"
#include "scinv/geometry.hpp"
#include "scinv/sections.hpp"
#include "scinv/tolerances.hpp"

namespace scinv {

enum class ControllerKind { constant, random_admissible, safe };

inline const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::constant:
      return "constant";
    case ControllerKind::random_admissible:
      return "random";
    case ControllerKind::safe:
      return "safe";
  }
  return "constant";
}

class Controller {
 public:
  /// section is the current admissible input set at x, or nullptr when the
  /// controller does not ask for one.
  using Policy = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Polytope* section)>;

  Controller(ControllerKind kind, bool uses_section, Policy policy)
      : kind_(kind), uses_section_(uses_section), policy_(std::move(policy)) {}

  ControllerKind kind() const { return kind_; }
  bool uses_section() const { return uses_section_; }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x, const Polytope* section = nullptr) const {
    return policy_(x, section);
  }

 private:
  ControllerKind kind_;
  bool uses_section_;
  Policy policy_;
};

/// Returns u_c at every state, ignoring sections.
inline Controller constant_controller(Eigen::VectorXd u_c) {
  if (!u_c.allFinite()) throw InvalidArgument("constant controller value must be finite");
  return Controller(ControllerKind::constant, false,
                    [u = std::move(u_c)](const Eigen::VectorXd&, const Polytope*) { return u; });
}

/// Uniform draw from the supplied section. The engine is shared so several
/// controllers (or a controller and its caller) can consume one stream.
inline Controller random_admissible_controller(std::shared_ptr<Rng> rng) {
  if (!rng) throw InvalidArgument("random controller needs an rng");
  return Controller(ControllerKind::random_admissible, true,
                    [rng = std::move(rng)](const Eigen::VectorXd&, const Polytope* section) {
                      if (section == nullptr) throw ControllerInfeasible("random controller called without a section");
                      return sample_uniform(*section, *rng);
                    });
}

inline Controller random_admissible_controller(std::uint64_t seed) {
  return random_admissible_controller(std::make_shared<Rng>(seed));
}

/// Chebyshev center of x_section(z_ref, x). z_ref should be state-control
/// invariant; that is the caller's responsibility.
inline Controller safe_controller(Polytope z_ref, int n_x) {
  if (n_x <= 0 || n_x >= z_ref.dim()) throw InvalidArgument("safe controller: bad state dimension");
  return Controller(ControllerKind::safe, false, [z = std::move(z_ref)](const Eigen::VectorXd& x, const Polytope*) {
    const auto section = x_section(z, x);
    if (!section) throw ControllerInfeasible("safe controller: empty section, state is outside the reference projection");
    return chebyshev_center(*section).center;
  });
}

/// Declarative controller description, as read from an experiment config.
struct ControllerSpec {
  ControllerKind kind = ControllerKind::random_admissible;
  /// Constant value (constant kind only).
  Eigen::VectorXd value;
  /// Initial state for this schedule entry; random entries draw one when unset.
  std::optional<Eigen::VectorXd> x0;
};

}  // namespace scinv
