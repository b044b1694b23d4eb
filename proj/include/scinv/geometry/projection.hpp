#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "scinv/errors.hpp"
#include "scinv/geometry/operations.hpp"
#include "scinv/geometry/polytope.hpp"

namespace scinv {

namespace detail {

/// One Fourier-Motzkin step: removes coordinate k. The result is not pruned.
inline Polytope fourier_motzkin_step(const Polytope& p, int k) {
  const int d = p.dim();
  auto drop = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(d - 1);
    for (int i = 0, j = 0; i < d; ++i) {
      if (i != k) out[j++] = v[i];
    }
    return out;
  };

  std::vector<std::size_t> pos, neg;
  Polytope out(d - 1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p.row(i).normal[k];
    if (std::abs(a) <= tol::kDegenerate) {
      out.add(Halfspace(drop(p.row(i).normal), p.row(i).offset), p.label(i));
    } else if (a > 0) {
      pos.push_back(i);
    } else {
      neg.push_back(i);
    }
  }
  for (std::size_t ip : pos) {
    const Halfspace& rp = p.row(ip);
    const double ap = rp.normal[k];
    for (std::size_t in : neg) {
      const Halfspace& rn = p.row(in);
      const double an = -rn.normal[k];
      Eigen::VectorXd n = rp.normal / ap + rn.normal / an;
      const double o = rp.offset / ap + rn.offset / an;
      n[k] = 0.0;
      RowLabel label = p.label(ip);
      if (p.label(in).iteration > label.iteration) label = p.label(in);
      label.source_row = -1;
      out.add(Halfspace(drop(n), o), label);
    }
  }
  return out;
}

}  // namespace detail

/// Projection of p onto the coordinates in `keep`, by Fourier-Motzkin
/// elimination of every other coordinate with redundancy removal after each
/// step. The result lives in dimension keep.size() with coordinates in
/// ascending index order.
inline Polytope project_eliminate(const Polytope& p, std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.empty() || static_cast<int>(keep.size()) >= p.dim()) {
    throw InvalidArgument("project_eliminate: keep must be a nonempty proper subset of the coordinates");
  }
  if (keep.front() < 0 || keep.back() >= p.dim()) throw InvalidArgument("project_eliminate: coordinate out of range");

  Polytope cur = remove_redundancy(p);
  for (int k = p.dim() - 1; k >= 0; --k) {
    if (std::binary_search(keep.begin(), keep.end(), k)) continue;
    cur = remove_redundancy(detail::fourier_motzkin_step(cur, k));
  }
  return cur;
}

}  // namespace scinv
