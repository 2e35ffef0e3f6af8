#pragma once

// Sparse exterior algebra over R^7 with basis e_1..e_7 and dual basis
// e^1..e^7. Index labels exposed to users are 1-based, matching the usual
// e^{ijk} notation; Eigen vectors and matrices are indexed from 0.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "g2flow/types.hpp"

namespace g2flow {

/// Strictly increasing tuple of labels in 1..7, stored as a bitmask
/// (bit i-1 set iff label i is present).
class MultiIndex {
 public:
  constexpr MultiIndex() = default;

  static constexpr MultiIndex from_mask(std::uint8_t mask) { return MultiIndex(mask); }

  /// Labels must be strictly increasing and lie in 1..7; throws otherwise.
  static MultiIndex from_labels(std::initializer_list<int> labels);
  static MultiIndex from_labels(const std::vector<int>& labels);

  static constexpr MultiIndex full() { return MultiIndex(0x7f); }

  constexpr std::uint8_t mask() const { return mask_; }
  int grade() const;
  bool contains(int label) const { return (mask_ >> (label - 1)) & 1u; }
  std::vector<int> labels() const;
  /// Labels of the complementary index in 1..7.
  MultiIndex complement() const { return MultiIndex(static_cast<std::uint8_t>(~mask_ & 0x7f)); }

  /// Position of this index in the lexicographic enumeration of its grade.
  int rank() const;

  std::string to_string() const;

  friend bool operator==(MultiIndex a, MultiIndex b) { return a.mask_ == b.mask_; }
  /// Orders by grade, then lexicographically by labels.
  friend std::strong_ordering operator<=>(MultiIndex a, MultiIndex b);

 private:
  constexpr explicit MultiIndex(std::uint8_t mask) : mask_(mask) {}
  std::uint8_t mask_ = 0;
};

/// All multi-indices of the given grade, in lexicographic order.
const std::vector<MultiIndex>& basis(int grade);

/// Number of basis k-forms, C(7, k).
int basis_size(int grade);

/// Sign of e^A ^ e^B relative to e^{A u B}; zero if A and B overlap.
int merge_sign(MultiIndex a, MultiIndex b);

/// Sparse alternating k-form. Coefficients with |value| < tol::kZero are never
/// stored.
class KForm {
 public:
  using Terms = std::map<MultiIndex, double>;

  explicit KForm(int grade = 0);

  static KForm scalar(double value);
  static KForm monomial(MultiIndex index, double value = 1.0);

  /// Builds a form from (labels, coefficient) pairs. Labels may come in any
  /// order; the permutation sign is applied, and repeated labels give zero.
  static KForm from_terms(int grade,
                          std::initializer_list<std::pair<std::initializer_list<int>, double>> terms);
  static KForm from_terms(int grade, const std::vector<std::pair<std::vector<int>, double>>& terms);

  /// Coordinates in the lexicographic monomial basis of the given grade.
  static KForm from_vector(int grade, const Eigen::VectorXd& coords);

  int grade() const { return grade_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  double coeff(MultiIndex index) const;
  double coeff(std::initializer_list<int> labels) const;

  /// Adds `value` to the coefficient of `index` and prunes if it cancels.
  void add_term(MultiIndex index, double value);

  Eigen::VectorXd to_vector() const;
  double max_abs() const;

  KForm& operator+=(const KForm& other);
  KForm& operator-=(const KForm& other);
  KForm& operator*=(double s);

  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator*(double s, KForm a) { return a *= s; }
  friend KForm operator*(KForm a, double s) { return a *= s; }
  friend KForm operator-(KForm a) { return a *= -1.0; }

  /// Human-readable sum such as "e^{1256} + e^{1346} - 2 e^{2467}".
  std::string to_string(int precision = 12) const;

 private:
  void check_index(MultiIndex index) const;

  int grade_;
  Terms terms_;
};

/// Infinity-norm distance between two forms of equal grade.
double max_abs_diff(const KForm& a, const KForm& b);

KForm wedge(const KForm& a, const KForm& b);

/// v ⌟ a: contraction in the first slot. Grade-0 input yields the zero form.
KForm interior(const Vector7& v, const KForm& a);

/// (h^* a)(x_1, ..., x_k) = a(h x_1, ..., h x_k).
KForm pullback(const Endomorphism& h, const KForm& a);

/// Left action h . a = (h^{-1})^* a. Throws on singular h.
KForm gl_action(const Endomorphism& h, const KForm& a);

/// Infinitesimal action: theta(A) a = d/dt (e^{tA} . a) at t = 0, i.e.
/// -sum_i a(..., A x_i, ...).
KForm theta(const Endomorphism& a_mat, const KForm& a);

/// <a, b>_g = (1/k!) a_{I} b_{J} g^{i1 j1} ... g^{ik jk}.
double form_inner_product(const KForm& a, const KForm& b, const BilinearForm& g);

/// Hodge star defined by alpha ^ *beta = <alpha, beta>_g vol. `vol` must be
/// +-sqrt(det g) e^{1..7}.
KForm hodge_star(const KForm& a, const BilinearForm& g, const KForm& vol);

/// Determinant of the submatrix m[rows, cols] (labels are 1-based bits).
double minor_det(const Matrix7& m, MultiIndex rows, MultiIndex cols);

/// Coordinates of gl(7): A(i, j) sits at index 7 i + j.
Eigen::VectorXd gl_coordinates(const Matrix7& a);
Matrix7 gl_from_coordinates(const Eigen::VectorXd& coords);

/// Matrix of the linear map A -> theta(A) a from gl(7) (coordinates
/// A(i, j) at column 7 i + j) to the monomial coordinates of grade |a|.
Eigen::MatrixXd theta_matrix(const KForm& a);

}  // namespace g2flow
