#pragma once

#include <Eigen/Dense>

#include <utility>

#include "scinv/dynamics/joint.hpp"
#include "scinv/dynamics/oracle.hpp"
#include "scinv/errors.hpp"
#include "scinv/geometry.hpp"

namespace scinv {

/// x(k+1) = A x(k) + B u(k)
struct LtiSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;

  LtiSystem(Eigen::MatrixXd a, Eigen::MatrixXd b) : A(std::move(a)), B(std::move(b)) {
    if (A.rows() == 0 || A.rows() != A.cols()) throw DimensionMismatch("A must be square and nonempty");
    if (B.rows() != A.rows() || B.cols() == 0) throw DimensionMismatch("B must have as many rows as A");
    if (!A.allFinite() || !B.allFinite()) throw InvalidArgument("A and B must be finite");
  }

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }

  /// [A B], mapping z = (x, u) to the successor state.
  Eigen::MatrixXd AB() const {
    Eigen::MatrixXd m(A.rows(), A.cols() + B.cols());
    m << A, B;
    return m;
  }
};

inline Eigen::VectorXd step(const LtiSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  if (x.size() != sys.state_dim() || u.size() != sys.input_dim()) throw DimensionMismatch("step: bad x or u dimension");
  return sys.A * x + sys.B * u;
}

/// Wraps the system so that callers only see next_state.
inline StepOracle make_step_oracle(const LtiSystem& sys) {
  return StepOracle(sys.state_dim(), sys.input_dim(),
                    [sys](const Eigen::VectorXd& x, const Eigen::VectorXd& u) { return step(sys, x, u); });
}

}  // namespace scinv
