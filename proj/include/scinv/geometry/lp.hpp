#pragma once

// Dense two-phase tableau simplex for the small LPs that back every
// polytope operation. Variables are free; they are split into positive and
// negative parts internally. Bland's rule prevents cycling.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "scinv/errors.hpp"
#include "scinv/geometry/polytope.hpp"
#include "scinv/tolerances.hpp"

namespace scinv {

enum class LpStatus { optimal, infeasible, unbounded };
enum class Sense { maximize, minimize };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double optimum = 0.0;
  Eigen::VectorXd argument;

  bool optimal() const { return status == LpStatus::optimal; }
};

namespace detail {

class DenseSimplex {
 public:
  // minimize c.y subject to G y <= g, y free.
  DenseSimplex(const Eigen::MatrixXd& G, const Eigen::VectorXd& g) : m_(G.rows()), d_(G.cols()) {
    n_art_ = 0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (g[i] < 0) ++n_art_;
    }
    ncols_ = 2 * d_ + m_ + n_art_;
    tab_ = Eigen::MatrixXd::Zero(m_ + 1, ncols_ + 1);
    basis_.assign(static_cast<std::size_t>(m_), 0);
    allowed_.assign(static_cast<std::size_t>(ncols_), true);
    scale_ = 1.0 + (g.size() > 0 ? g.cwiseAbs().maxCoeff() : 0.0);

    Eigen::Index art = 2 * d_ + m_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = g[i] < 0 ? -1.0 : 1.0;
      tab_.block(i, 0, 1, d_) = sign * G.row(i);
      tab_.block(i, d_, 1, d_) = -sign * G.row(i);
      tab_(i, 2 * d_ + i) = sign;
      tab_(i, ncols_) = sign * g[i];
      if (g[i] < 0) {
        tab_(i, art) = 1.0;
        basis_[static_cast<std::size_t>(i)] = art++;
      } else {
        basis_[static_cast<std::size_t>(i)] = 2 * d_ + i;
      }
    }
  }

  LpResult minimize(const Eigen::VectorXd& c) {
    LpResult res;
    if (!phase_one()) {
      res.status = LpStatus::infeasible;
      return res;
    }
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncols_);
    cost.head(d_) = c;
    cost.segment(d_, d_) = -c;
    load_objective(cost);
    if (!iterate()) {
      res.status = LpStatus::unbounded;
      return res;
    }
    res.status = LpStatus::optimal;
    res.argument = solution();
    res.optimum = c.dot(res.argument);
    return res;
  }

  bool feasible() { return phase_one(); }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(ncols_);
    for (Eigen::Index i = 0; i < m_; ++i) v[basis_[static_cast<std::size_t>(i)]] = tab_(i, ncols_);
    return v.head(d_) - v.segment(d_, d_);
  }

 private:
  static constexpr double kPivot = 1e-11;
  static constexpr double kCost = 1e-11;

  void load_objective(const Eigen::VectorXd& cost) {
    tab_.row(m_).setZero();
    tab_.row(m_).head(ncols_) = cost.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = cost[basis_[static_cast<std::size_t>(i)]];
      if (cb != 0.0) tab_.row(m_) -= cb * tab_.row(i);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    tab_.row(r) /= tab_(r, c);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = tab_(i, c);
      if (f != 0.0) tab_.row(i) -= f * tab_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Returns false when unbounded.
  bool iterate() {
    const long cap = 5000 + 50L * (m_ + ncols_);
    for (long it = 0; it < cap; ++it) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < ncols_; ++j) {
        if (allowed_[static_cast<std::size_t>(j)] && tab_(m_, j) < -kCost) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = tab_(i, enter);
        if (a > kPivot) best = std::min(best, tab_(i, ncols_) / a);
      }
      if (!std::isfinite(best)) return false;
      // Bland: among tied rows, the one whose basic variable has the smallest index.
      Eigen::Index leave = -1;
      const double tie = 1e-12 * (1.0 + std::abs(best));
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = tab_(i, enter);
        if (a <= kPivot || tab_(i, ncols_) / a > best + tie) continue;
        if (leave < 0 || basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) leave = i;
      }
      pivot(leave, enter);
    }
    throw NumericalFailure("simplex exceeded its iteration cap");
  }

  bool phase_one() {
    if (phase_one_done_) return phase_one_feasible_;
    phase_one_done_ = true;
    if (n_art_ > 0) {
      Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncols_);
      cost.tail(n_art_).setOnes();
      load_objective(cost);
      iterate();
      const double infeasibility = -tab_(m_, ncols_);
      if (infeasibility > tol::kFeasibility * scale_) {
        phase_one_feasible_ = false;
        return false;
      }
      const Eigen::Index first_art = 2 * d_ + m_;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (basis_[static_cast<std::size_t>(i)] < first_art) continue;
        for (Eigen::Index j = 0; j < first_art; ++j) {
          if (std::abs(tab_(i, j)) > 1e-9) {
            pivot(i, j);
            break;
          }
        }
      }
      for (Eigen::Index j = first_art; j < ncols_; ++j) allowed_[static_cast<std::size_t>(j)] = false;
    }
    phase_one_feasible_ = true;
    return true;
  }

  Eigen::Index m_, d_, n_art_ = 0, ncols_ = 0;
  Eigen::MatrixXd tab_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> allowed_;
  double scale_ = 1.0;
  bool phase_one_done_ = false;
  bool phase_one_feasible_ = false;
};

// Closed form for one-dimensional problems: the feasible set is an interval.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool empty = false;
};

inline Interval interval_of(const Eigen::MatrixXd& G, const Eigen::VectorXd& g) {
  Interval iv;
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    const double a = G(i, 0);
    if (std::abs(a) <= tol::kDegenerate) {
      if (g[i] < -tol::kFeasibility) iv.empty = true;
      continue;
    }
    if (a > 0) {
      iv.hi = std::min(iv.hi, g[i] / a);
    } else {
      iv.lo = std::max(iv.lo, g[i] / a);
    }
  }
  const double scale = 1.0 + std::max(std::isfinite(iv.lo) ? std::abs(iv.lo) : 0.0,
                                      std::isfinite(iv.hi) ? std::abs(iv.hi) : 0.0);
  if (iv.lo > iv.hi + tol::kFeasibility * scale) iv.empty = true;
  return iv;
}

// Minimizes c * y over the interval.
inline LpResult solve_interval(double c, const Interval& iv) {
  LpResult res;
  if (iv.empty) return res;
  const double lo = std::min(iv.lo, iv.hi);
  const double hi = std::max(iv.lo, iv.hi);
  double y = 0.0;
  if (c > 0) {
    if (!std::isfinite(lo)) return {LpStatus::unbounded, 0.0, {}};
    y = lo;
  } else if (c < 0) {
    if (!std::isfinite(hi)) return {LpStatus::unbounded, 0.0, {}};
    y = hi;
  } else {
    y = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
  }
  res.status = LpStatus::optimal;
  res.argument = Eigen::VectorXd::Constant(1, y);
  res.optimum = c * y;
  return res;
}

}  // namespace detail

/// Optimizes objective . y over { y : G y <= g }.
inline LpResult lp_solve(const Eigen::VectorXd& objective, const Eigen::MatrixXd& G, const Eigen::VectorXd& g,
                         Sense sense) {
  if (objective.size() != G.cols()) throw DimensionMismatch("lp_solve: objective dimension differs from constraints");
  const double flip = sense == Sense::maximize ? -1.0 : 1.0;
  if (G.cols() == 1) {
    LpResult r = detail::solve_interval(flip * objective[0], detail::interval_of(G, g));
    if (r.optimal()) r.optimum = objective[0] * r.argument[0];
    return r;
  }
  detail::DenseSimplex simplex(G, g);
  LpResult r = simplex.minimize(flip * objective);
  if (r.optimal()) r.optimum = objective.dot(r.argument);
  return r;
}

inline LpResult lp_solve(const Eigen::VectorXd& objective, const Polytope& p, Sense sense) {
  if (objective.size() != p.dim()) throw DimensionMismatch("lp_solve: objective dimension differs from polytope");
  return lp_solve(objective, p.normals(), p.offsets(), sense);
}

/// Feasibility of { y : G y <= g } within the feasibility tolerance.
inline bool is_feasible(const Eigen::MatrixXd& G, const Eigen::VectorXd& g) {
  if (G.rows() == 0) return true;
  if (G.cols() == 1) return !detail::interval_of(G, g).empty;
  detail::DenseSimplex simplex(G, g);
  return simplex.feasible();
}

inline bool is_empty(const Polytope& p) { return !is_feasible(p.normals(), p.offsets()); }

}  // namespace scinv
