#pragma once

#include <Eigen/Dense>

namespace g2flow {

inline constexpr int kDim = 7;

using Vector7 = Eigen::Matrix<double, kDim, 1>;
using Matrix7 = Eigen::Matrix<double, kDim, kDim>;

/// Column-action convention: A e_j = sum_i A(i, j) e_i.
using Endomorphism = Matrix7;

/// Matrix of a bilinear form in the basis e_1..e_7, B(i, j) = B(e_i, e_j).
using BilinearForm = Matrix7;

namespace tol {
/// Coefficients below this are dropped from sparse forms.
inline constexpr double kZero = 1e-12;
/// Default assertion / predicate tolerance for algebraic identities.
inline constexpr double kCompare = 1e-9;
/// Residual above which a decomposition is declared inconsistent.
inline constexpr double kFatal = 1e-6;
/// Singular-value cutoff used for every rank decision.
inline constexpr double kRank = 1e-9;
}  // namespace tol

}  // namespace g2flow
