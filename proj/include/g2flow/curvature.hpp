#pragma once

#include <array>

#include "g2flow/g2_structure.hpp"
#include "g2flow/lie_algebra.hpp"
#include "g2flow/types.hpp"

namespace g2flow {

/// Levi-Civita connection of a left-invariant metric. `nabla[a]` is the
/// endomorphism e_j -> nabla_{e_a} e_j (column j).
struct ConnectionCoefficients {
  std::array<Matrix7, kDim> nabla;

  Vector7 covariant(int a, int j) const { return nabla[a].col(j); }
  /// nabla_x acting on left-invariant fields.
  Matrix7 along(const Vector7& x) const;
};

/// Koszul formula 2<nabla_x y, z> = <[x,y],z> - <[y,z],x> + <[z,x],y>.
ConnectionCoefficients levi_civita(const StructureConstants& mu, const BilinearForm& g);

/// R(e_a, e_b) = nabla_a nabla_b - nabla_b nabla_a - nabla_{[a,b]}.
Matrix7 riemann(const ConnectionCoefficients& conn, const StructureConstants& mu, int a, int b);

struct RicciResult {
  BilinearForm ric;  // ric(x, y) = tr(z -> R(z, x) y)
  double scalar = 0.0;
};

RicciResult ricci(const StructureConstants& mu, const BilinearForm& g);

/// |ric|_g^2 = tr(g^{-1} ric g^{-1} ric).
double ricci_norm_squared(const RicciResult& r, const BilinearForm& g);

struct RicciSolitonReport {
  double lambda = 0.0;
  Endomorphism D = Endomorphism::Zero();
  double residual = 0.0;  // max-norm of Ric_op - lambda I - D
};

/// Least-squares decomposition Ric_op = g^{-1} ric = lambda I + D with D in
/// Der(mu).
RicciSolitonReport ricci_soliton_check(const StructureConstants& mu, const BilinearForm& g);

/// R^2 / |ric|^2. Throws Precondition on a Ricci-flat metric.
double pinching_ratio(const StructureConstants& mu, const BilinearForm& g);

/// |R + 1/2 |tau3|^2| for a coclosed structure with tau0 = 0. Throws
/// Precondition otherwise.
double scalar_torsion_identity(const G2Structure& g2, const StructureConstants& mu);

}  // namespace g2flow
