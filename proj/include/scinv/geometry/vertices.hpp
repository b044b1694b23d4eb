#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "scinv/errors.hpp"
#include "scinv/geometry/operations.hpp"
#include "scinv/geometry/polytope.hpp"

namespace scinv {

namespace detail {

/// Calls f(indices) for every subset of {0..n-1} of size k, in lexicographic order.
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
  if (k > n || k < 0) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

inline void sort_counterclockwise(std::vector<Eigen::VectorXd>& pts) {
  if (pts.empty() || pts.front().size() != 2) return;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
  });
}

}  // namespace detail

/// Extreme points by brute force over all d-row subsets. Intended for d <= 4.
/// In two dimensions the vertices come back in counterclockwise order.
inline std::vector<Eigen::VectorXd> enumerate_vertices(const Polytope& p) {
  const int d = p.dim();
  if (d > 4) throw InvalidArgument("enumerate_vertices supports dimension <= 4");
  if (!is_bounded(p)) throw UnboundedPolytope("enumerate_vertices: polytope is unbounded");

  const Polytope q = normalized(p);
  const Eigen::MatrixXd H = q.normals();
  const Eigen::VectorXd h = q.offsets();
  std::vector<Eigen::VectorXd> verts;
  detail::for_each_subset(static_cast<int>(q.size()), d, [&](const std::vector<int>& s) {
    Eigen::MatrixXd M(d, d);
    Eigen::VectorXd b(d);
    for (int i = 0; i < d; ++i) {
      M.row(i) = H.row(s[static_cast<std::size_t>(i)]);
      b[i] = h[s[static_cast<std::size_t>(i)]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    if (lu.rank() < d) return;
    const Eigen::VectorXd v = lu.solve(b);
    if (!is_member(q, v, tol::kVertexMerge * (1.0 + v.cwiseAbs().maxCoeff()))) return;
    for (const auto& w : verts) {
      if ((w - v).cwiseAbs().maxCoeff() <= tol::kVertexMerge * (1.0 + v.cwiseAbs().maxCoeff())) return;
    }
    verts.push_back(v);
  });
  detail::sort_counterclockwise(verts);
  return verts;
}

/// Euclidean distance from y to the polytope. The projection lies in the
/// relative interior of some face, so it is the nearest feasible point among
/// the projections onto the affine hulls of independent active sets.
inline double distance_to(const Polytope& p, const Eigen::VectorXd& y) {
  check_dim(p, y, "distance_to");
  const Polytope q = normalized(p);
  if (is_member(q, y, 0.0)) return 0.0;
  const int d = q.dim();
  const int m = static_cast<int>(q.size());
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= std::min(d, m); ++k) {
    detail::for_each_subset(m, k, [&](const std::vector<int>& s) {
      Eigen::MatrixXd N(k, d);
      Eigen::VectorXd o(k);
      for (int i = 0; i < k; ++i) {
        N.row(i) = q.row(static_cast<std::size_t>(s[static_cast<std::size_t>(i)])).normal.transpose();
        o[i] = q.row(static_cast<std::size_t>(s[static_cast<std::size_t>(i)])).offset;
      }
      const Eigen::MatrixXd gram = N * N.transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
      lu.setThreshold(1e-10);
      if (lu.rank() < k) return;
      const Eigen::VectorXd x = y - N.transpose() * lu.solve(N * y - o);
      if (!is_member(q, x, tol::kFeasibility)) return;
      best = std::min(best, (x - y).norm());
    });
  }
  if (!std::isfinite(best)) throw EmptyPolytope("distance_to: polytope is empty");
  return best;
}

/// Symmetric Hausdorff distance between bounded polytopes. Distance to a
/// convex set is convex, so the maximum over each set is at a vertex.
inline double hausdorff(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("hausdorff: polytope dimensions differ");
  double h = 0.0;
  for (const auto& v : enumerate_vertices(p)) h = std::max(h, distance_to(q, v));
  for (const auto& v : enumerate_vertices(q)) h = std::max(h, distance_to(p, v));
  return h;
}

}  // namespace scinv
