#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "g2flow/exterior_algebra.hpp"
#include "g2flow/types.hpp"

namespace g2flow {

inline constexpr int kPairs = kDim * (kDim - 1) / 2;      // 21
inline constexpr int kBracketCoords = kPairs * kDim;       // 147

using BracketCoordinates = Eigen::Matrix<double, kBracketCoords, 1>;

/// Index of the pair (i, j), 0 <= i < j < 7, in lexicographic order.
int pair_index(int i, int j);

/// Skew-symmetric bilinear map R^7 x R^7 -> R^7 given by structure constants
/// [e_i, e_j] = sum_k c^k_{ij} e_k. Only i < j is stored. Nothing here enforces
/// the Jacobi identity: the same type carries delta_mu(A) and flow velocities.
class StructureConstants {
 public:
  StructureConstants();

  static StructureConstants zero() { return {}; }
  static StructureConstants from_coordinates(const BracketCoordinates& coords);

  /// Labels are 1-based: set(7, 1, 6, 1.0) means [e_7, e_1] has e_6-coefficient 1.
  /// Setting (i, j) with i > j stores the negated value on (j, i).
  void set(int i, int j, int k, double value);
  double get(int i, int j, int k) const;

  /// [e_i, e_j] for 0-based i, j.
  Vector7 bracket_basis(int i, int j) const;
  Vector7 bracket(const Vector7& x, const Vector7& y) const;

  /// c^k_{ij} for i < j at index 7 * pair_index(i, j) + k.
  BracketCoordinates coordinates() const;

  double max_abs() const;

  StructureConstants& operator+=(const StructureConstants& o);
  StructureConstants& operator-=(const StructureConstants& o);
  StructureConstants& operator*=(double s);
  friend StructureConstants operator+(StructureConstants a, const StructureConstants& b) { return a += b; }
  friend StructureConstants operator-(StructureConstants a, const StructureConstants& b) { return a -= b; }
  friend StructureConstants operator*(double s, StructureConstants a) { return a *= s; }

 private:
  std::array<Vector7, kPairs> pairs_;
};

double max_abs_diff(const StructureConstants& a, const StructureConstants& b);

/// Max over basis triples of the infinity norm of the cyclic Jacobi sum.
double jacobi_residual(const StructureConstants& mu);

/// Chevalley–Eilenberg differential, d alpha(x, y) = -alpha([x, y]) on
/// 1-forms, extended as an antiderivation.
KForm ce_differential(const StructureConstants& mu, const KForm& a);

/// R x_A R^6 with [e_7, v] = A v for v in span(e_1..e_6).
StructureConstants almost_abelian(const Eigen::Matrix<double, 6, 6>& a6);

/// max over i < j of |D[e_i, e_j] - [D e_i, e_j] - [e_i, D e_j]|.
double derivation_residual(const StructureConstants& mu, const Endomorphism& d);

struct DerivationBasis {
  std::vector<Endomorphism> basis;  // orthonormal in the Frobenius inner product
  int dim() const { return static_cast<int>(basis.size()); }
};

/// Null space of D -> delta_mu(D) on gl(7). Requires a Lie bracket.
DerivationBasis derivation_space(const StructureConstants& mu);

/// (h . mu)(x, y) = h mu(h^{-1} x, h^{-1} y).
StructureConstants bracket_action(const Endomorphism& h, const StructureConstants& mu);

/// delta_mu(A) = -A mu(., .) + mu(A ., .) + mu(., A .).
StructureConstants delta(const StructureConstants& mu, const Endomorphism& a);

/// Matrix of A -> delta_mu(A), columns indexed as in gl_coordinates.
Eigen::MatrixXd delta_matrix(const StructureConstants& mu);

}  // namespace g2flow
