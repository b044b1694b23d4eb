#pragma once

#include <random>

namespace scinv {

namespace tol {
inline constexpr double kDegenerate = 1e-12;
inline constexpr double kFeasibility = 1e-9;
inline constexpr double kRedundancy = 1e-7;
inline constexpr double kSetEquality = 1e-6;
inline constexpr double kVertexMerge = 1e-8;
/// Learned rows are compared against reference rows at this accuracy.
inline constexpr double kHalfspaceMatch = 1e-3;
/// Relative smallest-singular-value threshold for regressor windows.
inline constexpr double kRank = 1e-8;
}  // namespace tol

using Rng = std::mt19937_64;

}  // namespace scinv
