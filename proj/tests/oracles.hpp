#pragma once

// Slow reference implementations used only by the tests. They work from the
// defining formulas (multilinear evaluation, Koszul-type expansions) rather
// than from the minor/merge-sign tables used by the library.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "g2flow/g2_structure.hpp"
#include "g2flow/lie_algebra.hpp"

namespace g2flow::testing {

// ------------------------------------------------------------- example data

/// e^{167} + e^{257} + e^{347} + e^{135} - e^{124} - e^{236} - e^{456}.
KForm example_phi();
/// Almost-abelian bracket with [e_7, e_1] = e_6, [e_7, e_6] = e_1,
/// [e_7, e_3] = e_4, [e_7, e_4] = e_3.
StructureConstants example_bracket();
Eigen::Matrix<double, 6, 6> example_matrix();
/// su(2) + R^4 with [e_1, e_2] = e_3 and cyclic.
StructureConstants su2_plus_abelian();

// ------------------------------------------------------------------ oracles

int permutation_sign(const std::vector<int>& p);

/// a(v_1, ..., v_k) by the Leibniz expansion of the defining determinants.
double evaluate(const KForm& a, const std::vector<Vector7>& vs);

/// The k-form whose coefficient on e^I is f(e_{i_1}, ..., e_{i_k}).
KForm from_evaluator(int grade, const std::function<double(const std::vector<Vector7>&)>& f);

/// (a ^ b)(v) = 1/(k! l!) sum over S_{k+l} of sgn * a(...) b(...).
KForm wedge(const KForm& a, const KForm& b);
KForm interior(const Vector7& v, const KForm& a);
KForm pullback(const Matrix7& h, const KForm& a);

/// d a(x_0..x_k) = sum_{i<j} (-1)^{i+j} a([x_i, x_j], x_0, ..^i..^j.., x_k).
KForm ce_differential(const StructureConstants& mu, const KForm& a);

/// g-orthonormal frame (columns).
Matrix7 orthonormal_frame(const Matrix7& g);

/// <a, b> = sum over increasing I of a(f_I) b(f_I) for an orthonormal frame f.
double inner(const KForm& a, const KForm& b, const Matrix7& g);

/// *b from a ^ *b = <a, b> vol, vol = sign sqrt(det g) e^{1..7}.
KForm hodge(const KForm& b, const Matrix7& g, double orientation = 1.0);

/// Ricci tensor from the formula for left-invariant metrics in an
/// orthonormal frame, polarized.
Matrix7 ricci(const StructureConstants& mu, const Matrix7& g);

/// T_nabla(l, m) with nabla_l phi = sum_m T_nabla(l, m) (g^{-1} e^m) ⌟ psi,
/// from the Levi-Civita connection; also returns the least-squares residual.
Matrix7 torsion_from_connection(const G2Structure& g2, const StructureConstants& mu, double* residual = nullptr);

// ------------------------------------------------------------ random inputs

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double normal() { return normal_(eng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  Matrix7 matrix(double scale = 1.0);
  Eigen::Matrix<double, 6, 6> matrix6(double scale = 1.0);
  Vector7 vector();
  /// I + scale * N(0, 1) entries; well conditioned for scale <= 0.3.
  Matrix7 near_identity(double scale = 0.25);
  Matrix7 spd();
  KForm form(int grade);

  /// Random almost-abelian, transported, su(2)-type or nilpotent Lie bracket.
  StructureConstants lie_algebra();
  /// Structure constants with i.i.d. normal entries (Jacobi fails generically).
  StructureConstants generic_bracket();
  /// A in sp(omega) for omega = e^{16} + e^{25} + e^{34}; the example 3-form is
  /// then coclosed for the almost-abelian bracket of A.
  Eigen::Matrix<double, 6, 6> symplectic6();
  /// phi = h . phi_example with det h > 0.
  KForm g2_phi(double scale = 0.25);

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_;
};

}  // namespace g2flow::testing
