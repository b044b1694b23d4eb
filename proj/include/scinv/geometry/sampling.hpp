#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "scinv/geometry/operations.hpp"
#include "scinv/geometry/polytope.hpp"
#include "scinv/tolerances.hpp"

namespace scinv {

inline constexpr int kRejectionAttempts = 10000;
inline constexpr int kHitAndRunSteps = 50;

namespace detail {

/// Hit-and-run from the Chebyshev center. Degenerate sets collapse onto the
/// center.
inline Eigen::VectorXd hit_and_run(const Polytope& p, Rng& rng, int steps) {
  const Ball ball = chebyshev_center(p);
  Eigen::VectorXd y = ball.center;
  const int d = p.dim();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXd dir(d);
    for (int i = 0; i < d; ++i) dir[i] = gauss(rng);
    if (dir.norm() <= tol::kDegenerate) continue;
    dir.normalize();
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& r : p.rows()) {
      const double a = r.normal.dot(dir);
      const double slack = r.offset - r.normal.dot(y);
      if (std::abs(a) <= tol::kDegenerate) continue;
      if (a > 0) {
        hi = std::min(hi, slack / a);
      } else {
        lo = std::max(lo, slack / a);
      }
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi <= lo) continue;
    y += (lo + (hi - lo) * unit(rng)) * dir;
  }
  return y;
}

}  // namespace detail

/// Uniform draw from a bounded polytope: rejection inside the bounding box,
/// falling back to hit-and-run when rejection keeps missing.
inline Eigen::VectorXd sample_uniform(const Polytope& p, Rng& rng) {
  const BoundingBox box = bounding_box(p);
  const int d = p.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < kRejectionAttempts; ++attempt) {
    Eigen::VectorXd y(d);
    for (int i = 0; i < d; ++i) {
      const double lo = std::min(box.lower[i], box.upper[i]);
      const double hi = std::max(box.lower[i], box.upper[i]);
      y[i] = lo + (hi - lo) * unit(rng);
    }
    if (is_member(p, y, 0.0)) return y;
    if (d == 1 && is_member(p, y, tol::kFeasibility)) return y;
  }
  return detail::hit_and_run(p, rng, kHitAndRunSteps);
}

}  // namespace scinv
