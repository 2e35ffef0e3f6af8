#include "g2flow/curvature.hpp"

#include <cmath>

#include "g2flow/error.hpp"

namespace g2flow {

Matrix7 ConnectionCoefficients::along(const Vector7& x) const {
  Matrix7 m = Matrix7::Zero();
  for (int a = 0; a < kDim; ++a)
    if (x[a] != 0.0) m += x[a] * nabla[a];
  return m;
}

ConnectionCoefficients levi_civita(const StructureConstants& mu, const BilinearForm& g) {
  Eigen::FullPivLU<Matrix7> lu(g);
  if (!lu.isInvertible()) fail_precondition("levi_civita", "singular metric");
  const Matrix7 ginv = lu.inverse();
  // cg(i, j) = g([e_i, e_j], .) as a covector.
  std::array<std::array<Vector7, kDim>, kDim> cg;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) cg[i][j] = g * mu.bracket_basis(i, j);

  ConnectionCoefficients conn;
  for (int a = 0; a < kDim; ++a) {
    for (int j = 0; j < kDim; ++j) {
      Vector7 lower;
      for (int l = 0; l < kDim; ++l) lower[l] = 0.5 * (cg[a][j][l] - cg[j][l][a] + cg[l][a][j]);
      conn.nabla[a].col(j) = ginv * lower;
    }
  }
  return conn;
}

Matrix7 riemann(const ConnectionCoefficients& conn, const StructureConstants& mu, int a, int b) {
  return conn.nabla[a] * conn.nabla[b] - conn.nabla[b] * conn.nabla[a] - conn.along(mu.bracket_basis(a, b));
}

RicciResult ricci(const StructureConstants& mu, const BilinearForm& g) {
  const ConnectionCoefficients conn = levi_civita(mu, g);
  RicciResult r;
  r.ric.setZero();
  for (int z = 0; z < kDim; ++z) {
    for (int x = 0; x < kDim; ++x) {
      const Matrix7 rzx = riemann(conn, mu, z, x);
      // e^z(R(e_z, e_x) e_y) for every y.
      r.ric.row(x) += rzx.row(z);
    }
  }
  r.scalar = (g.inverse() * r.ric).trace();
  return r;
}

double ricci_norm_squared(const RicciResult& r, const BilinearForm& g) {
  const Matrix7 op = g.inverse() * r.ric;
  return (op * op).trace();
}

RicciSolitonReport ricci_soliton_check(const StructureConstants& mu, const BilinearForm& g) {
  const RicciResult r = ricci(mu, g);
  const Endomorphism op = g.inverse() * r.ric;
  const DerivationBasis der = derivation_space(mu);

  Eigen::MatrixXd m(kDim * kDim, 1 + der.dim());
  m.col(0) = gl_coordinates(Matrix7::Identity());
  for (int n = 0; n < der.dim(); ++n) m.col(1 + n) = gl_coordinates(der.basis[n]);
  const Eigen::VectorXd rhs = gl_coordinates(op);
  const Eigen::VectorXd x = m.completeOrthogonalDecomposition().solve(rhs);

  RicciSolitonReport rep;
  rep.lambda = x[0];
  for (int n = 0; n < der.dim(); ++n) rep.D += x[1 + n] * der.basis[n];
  rep.residual = (op - rep.lambda * Matrix7::Identity() - rep.D).cwiseAbs().maxCoeff();
  return rep;
}

double pinching_ratio(const StructureConstants& mu, const BilinearForm& g) {
  const RicciResult r = ricci(mu, g);
  const double n2 = ricci_norm_squared(r, g);
  if (n2 < tol::kCompare * tol::kCompare) fail_precondition("pinching_ratio", "ratio undefined for Ricci-flat metric");
  return r.scalar * r.scalar / n2;
}

double scalar_torsion_identity(const G2Structure& g2, const StructureConstants& mu) {
  const TorsionForms tf = torsion_forms(g2, mu);
  const TorsionClass cls = torsion_class(tf);
  if (!cls.coclosed() || !cls.tau0_zero)
    fail_precondition("scalar_torsion_identity", "requires a coclosed structure with tau0 = 0");
  const double r = ricci(mu, g2.metric()).scalar;
  return std::abs(r + 0.5 * g2.norm_squared(tf.tau3));
}

}  // namespace g2flow
