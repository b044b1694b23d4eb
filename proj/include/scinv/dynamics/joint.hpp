#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iostream>
#include <string>
#include <string_view>

#include "scinv/geometry.hpp"

namespace scinv {

using WarningSink = std::function<void(std::string_view)>;

inline void warn_to_clog(std::string_view msg) { std::clog << "warning: " << msg << '\n'; }

/// { (x, u) : x in state_box, u in input_box }. The boxes may be any
/// polytopes; the input set does not depend on x.
inline Polytope make_joint_constraints(const Polytope& state_box, const Polytope& input_box,
                                       const WarningSink& warn = warn_to_clog) {
  const int n_x = state_box.dim();
  const int n_u = input_box.dim();
  for (const auto* p : {&state_box, &input_box}) {
    bool interior = true;
    for (const auto& r : p->rows()) interior = interior && r.offset > 0.0;
    if (!interior) warn("origin is not in the interior of the " + std::string(p == &state_box ? "state" : "input") + " constraints");
  }
  Polytope z(n_x + n_u);
  for (std::size_t i = 0; i < state_box.size(); ++i) {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(n_x + n_u);
    n.head(n_x) = state_box.row(i).normal;
    z.add(Halfspace(n, state_box.row(i).offset), RowLabel::initial());
  }
  for (std::size_t i = 0; i < input_box.size(); ++i) {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(n_x + n_u);
    n.tail(n_u) = input_box.row(i).normal;
    z.add(Halfspace(n, input_box.row(i).offset), RowLabel::initial());
  }
  return z;
}

}  // namespace scinv
