#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "g2flow/g2_structure.hpp"
#include "g2flow/lie_algebra.hpp"
#include "g2flow/types.hpp"

namespace g2flow {

inline constexpr int kG2Dimension = 14;

/// Basis of g_psi = {A : theta(A) psi = 0}. Throws Precondition unless the
/// kernel has dimension 14.
std::vector<Endomorphism> stabilizer_algebra(const KForm& psi);

/// Minimum-norm solutions of theta(Q) psi = Delta psi for a fixed psi. The
/// pseudo-inverse is computed once; the returned Q is Frobenius-orthogonal
/// to the stabilizer.
class QSolver {
 public:
  explicit QSolver(const KForm& psi);

  Endomorphism solve(const KForm& laplacian) const;
  /// Infinity norm of theta(Q) psi - laplacian.
  double residual(const Endomorphism& q, const KForm& laplacian) const;

  const KForm& psi() const { return psi_; }

 private:
  KForm psi_;
  Eigen::MatrixXd theta_;
  Eigen::MatrixXd pinv_;
};

/// Throws Residual (stage "solve_Q") when the solution misses by tol::kCompare.
Endomorphism solve_Q(const KForm& psi, const KForm& laplacian);

/// Diagonal derivation pattern such as "a,b,c,c,d,a,0": letters are free
/// parameters, numbers are fixed entries.
class DiagonalAnsatz {
 public:
  static DiagonalAnsatz parse(const std::string& pattern);

  const std::vector<std::string>& variables() const { return variables_; }
  /// Diagonal matrix with variable `n` set to 1 and constants cleared.
  Endomorphism variable_matrix(int n) const;
  Endomorphism constant_matrix() const;
  const std::string& pattern() const { return pattern_; }

 private:
  std::string pattern_;
  std::vector<std::string> variables_;
  std::array<int, kDim> slot_variable_{};  // -1 for constants
  std::array<double, kDim> slot_constant_{};
};

struct SolitonSolution {
  double c = 0.0;
  double lambda = 0.0;  // = 4 c
  Endomorphism D = Endomorphism::Zero();
  Endomorphism Q = Endomorphism::Zero();  // = c I + D
  double residual = 0.0;                  // |theta(Q) psi - Delta psi|_inf
  double derivation_residual = 0.0;
  /// Rank of the linear system in (c, D) and its number of unknowns.
  int rank = 0;
  int unknowns = 0;
};

/// Solves theta(c I + D) psi = Delta psi over D in Der(mu) (or the ansatz
/// family) by least squares. Returns nullopt if the residual is not below
/// `tolerance`.
std::optional<SolitonSolution> solve_algebraic_soliton(const G2Structure& g2, const StructureConstants& mu,
                                                       const DerivationBasis& der,
                                                       double tolerance = tol::kCompare);

std::optional<SolitonSolution> solve_algebraic_soliton(const G2Structure& g2, const StructureConstants& mu,
                                                       const DiagonalAnsatz& ansatz,
                                                       double tolerance = tol::kCompare);

/// One scalar equation sum_v coeffs[v] x_v + lambda_coeff * lambda = rhs.
struct LinearEquation {
  std::vector<double> coeffs;
  double lambda_coeff = 0.0;
  double rhs = 0.0;
};

/// The soliton equation -Delta psi = lambda psi + L_{X_D} psi restricted to a
/// diagonal ansatz, one equation per monomial, normalized to unit lambda
/// coefficient, with duplicates and trivial rows removed.
std::vector<LinearEquation> ansatz_system(const G2Structure& g2, const StructureConstants& mu,
                                          const DiagonalAnsatz& ansatz);

/// psi_t = b_t h_t . psi with b_t = (2ct+1)^2, h_t = exp(s_t D),
/// s_t = -log(2ct+1) / (2c). For c = 0: b = 1, s = -t.
class SelfSimilarTrajectory {
 public:
  SelfSimilarTrajectory(const SolitonSolution& sol, const G2Structure& g2);

  double c() const { return c_; }
  const Endomorphism& D() const { return D_; }
  bool in_domain(double t) const { return 2.0 * c_ * t + 1.0 > 0.0; }

  double b(double t) const;
  double s(double t) const;
  Endomorphism h(double t) const;
  /// Scalar factor of the equivalent bracket flow, mu_t = k(t) mu.
  double bracket_scale(double t) const;

  KForm psi(double t) const;
  KForm phi(double t) const;
  Endomorphism Q(double t) const;  // b_t^{-1/2} Q_psi

 private:
  void check(double t) const;

  double c_;
  Endomorphism D_;
  Endomorphism Q_;
  KForm phi0_{3};
  KForm psi0_{4};
};

SelfSimilarTrajectory self_similar(const SolitonSolution& sol, const G2Structure& g2);

/// |(psi_{t+dt} - psi_{t-dt}) / (2 dt) + Delta_t psi_t|_inf, with the
/// G2-structure at t rebuilt from psi_t alone.
double verify_coflow(const SelfSimilarTrajectory& traj, const StructureConstants& mu, double t, double dt);

}  // namespace g2flow
