#pragma once

#include <string>
#include <vector>

#include "g2flow/exterior_algebra.hpp"
#include "g2flow/lie_algebra.hpp"
#include "g2flow/types.hpp"

namespace g2flow {

struct MetricData {
  BilinearForm metric;
  KForm vol{kDim};
  /// True when B was negative definite and the reference volume e^{1..7}
  /// had to be replaced by -e^{1..7}.
  bool orientation_flipped = false;
};

/// Metric and volume induced by a 3-form:
///   (e_i ⌟ phi) ^ (e_j ⌟ phi) ^ phi = 6 B_ij e^{1..7},
///   g = det(B)^{-1/9} B,  vol = det(B)^{1/9} e^{1..7}.
/// Throws Precondition (stage "metric_from_phi") unless B is definite.
MetricData metric_from_phi(const KForm& phi);

/// A positive 3-form with its metric, volume form and dual 4-form psi = *phi.
class G2Structure {
 public:
  static G2Structure from_phi(const KForm& phi);

  /// Recovers phi from psi by Newton iteration on the GL(7)-orbit, starting
  /// from `phi_guess`. The orientation is the one of the guess branch.
  static G2Structure from_psi(const KForm& psi, const KForm& phi_guess, int max_iterations = 50);

  const KForm& phi() const { return phi_; }
  const KForm& psi() const { return psi_; }
  const BilinearForm& metric() const { return metric_; }
  const Matrix7& metric_inverse() const { return metric_inv_; }
  const KForm& vol() const { return vol_; }
  bool orientation_flipped() const { return flipped_; }

  KForm star(const KForm& a) const { return hodge_star(a, metric_, vol_); }
  double inner(const KForm& a, const KForm& b) const { return form_inner_product(a, b, metric_); }
  double norm_squared(const KForm& a) const { return inner(a, a); }

 private:
  G2Structure() = default;

  KForm phi_{3};
  KForm psi_{4};
  BilinearForm metric_;
  Matrix7 metric_inv_;
  KForm vol_{kDim};
  bool flipped_ = false;
};

struct TorsionForms {
  double tau0 = 0.0;
  KForm tau1{1};
  KForm tau2{2};
  KForm tau3{3};
  BilinearForm tau27 = BilinearForm::Zero();
  BilinearForm T = BilinearForm::Zero();
  /// Infinity-norm residual of the constrained decomposition.
  double residual = 0.0;
};

/// Least-squares inverse of bryant_i on traceless symmetric tensors.
class BryantInverse {
 public:
  explicit BryantInverse(const G2Structure& g2);

  /// Returns tau27 and writes the infinity-norm residual of i(tau27) = tau3.
  BilinearForm solve(const KForm& tau3, double& residual) const;

 private:
  Eigen::MatrixXd system_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
};

/// Solves d phi = tau0 psi + 3 tau1 ^ phi + *tau3 and
/// d psi = 4 tau1 ^ psi + *tau2 with tau2 in Omega^2_14, tau3 in Omega^3_27 by
/// least squares. The system matrix depends only on the G2-structure, so it is
/// factorized once and reused for any bracket.
class TorsionSolver {
 public:
  explicit TorsionSolver(const G2Structure& g2);

  TorsionForms solve(const StructureConstants& mu) const;
  /// Decomposition of given exterior derivatives (grade 4 and grade 5).
  TorsionForms decompose(const KForm& dphi, const KForm& dpsi) const;

  const G2Structure& structure() const { return g2_; }

 private:
  G2Structure g2_;
  Eigen::MatrixXd system_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
  BryantInverse bryant_inverse_;
};

/// Throws Residual (stage "torsion_forms") when the decomposition residual is
/// at least tol::kFatal.
TorsionForms torsion_forms(const G2Structure& g2, const StructureConstants& mu);

/// i(h) = 1/2 h_il g^lm phi_mjk dx^{ijk}.
KForm bryant_i(const BilinearForm& h, const G2Structure& g2);

/// j(eta)(u, v) = *((u ⌟ phi) ^ (v ⌟ phi) ^ eta).
BilinearForm bryant_j(const KForm& eta, const G2Structure& g2);

/// Traceless symmetric h with i(h) = tau3. Throws Residual when tau3 lies
/// outside the image (residual >= tol::kFatal).
BilinearForm tau27_from_tau3(const KForm& tau3, const G2Structure& g2);

/// T = tau0/4 g - tau27 + (tau1)^# ⌟ phi - 1/2 tau2, as a matrix T(a, b).
BilinearForm full_torsion(const TorsionForms& tf, const G2Structure& g2);

/// d^* = (-1)^k * d * on k-forms.
KForm codifferential(const KForm& a, const G2Structure& g2, const StructureConstants& mu);

/// (d d^* + d^* d) a.
KForm hodge_laplacian(const KForm& a, const G2Structure& g2, const StructureConstants& mu);

/// d tau0 ^ phi + tau0^2 psi + tau0 *tau3 + d tau3 (coclosed case; d tau0 = 0
/// for invariant forms).
KForm coclosed_laplacian(const TorsionForms& tf, const G2Structure& g2, const StructureConstants& mu);

struct TorsionClass {
  bool tau0_zero = false;
  bool tau1_zero = false;
  bool tau2_zero = false;
  bool tau3_zero = false;

  bool torsion_free() const { return tau0_zero && tau1_zero && tau2_zero && tau3_zero; }
  bool coclosed() const { return tau1_zero && tau2_zero; }
  bool nearly_parallel() const { return coclosed() && tau3_zero && !tau0_zero; }

  /// "torsion-free", "nearly parallel" or "coclosed"; empty for general torsion.
  std::vector<std::string> labels() const;
};

TorsionClass torsion_class(const TorsionForms& tf, double tolerance = tol::kCompare);

}  // namespace g2flow
