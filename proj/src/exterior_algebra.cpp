#include "g2flow/exterior_algebra.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "g2flow/error.hpp"

namespace g2flow {

namespace {

struct BasisTables {
  std::array<std::vector<MultiIndex>, kDim + 1> by_grade;
  std::array<int, 128> rank{};

  BasisTables() {
    // Lexicographic enumeration of k-subsets of {1..7}.
    for (int k = 0; k <= kDim; ++k) {
      std::vector<int> idx(k);
      for (int i = 0; i < k; ++i) idx[i] = i;
      while (true) {
        std::uint8_t mask = 0;
        for (int i : idx) mask |= static_cast<std::uint8_t>(1u << i);
        rank[mask] = static_cast<int>(by_grade[k].size());
        by_grade[k].push_back(MultiIndex::from_mask(mask));
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == kDim - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
      }
    }
  }
};

const BasisTables& tables() {
  static const BasisTables t;
  return t;
}

void check_grade(int grade, const char* stage) {
  if (grade < 0 || grade > kDim) fail_precondition(stage, "grade out of range 0..7");
}

int permutation_sign(std::vector<int>& labels) {
  // Insertion sort counting transpositions; returns 0 on repeated labels.
  int sign = 1;
  for (std::size_t i = 1; i < labels.size(); ++i) {
    for (std::size_t j = i; j > 0 && labels[j - 1] > labels[j]; --j) {
      std::swap(labels[j - 1], labels[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) return 0;
  return sign;
}

void require_spd(const BilinearForm& g, const char* stage) {
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > tol::kCompare)
    fail_precondition(stage, "metric is not symmetric");
  Eigen::LLT<Matrix7> llt(g);
  if (llt.info() != Eigen::Success) fail_precondition(stage, "metric is not positive definite");
}

}  // namespace

// ---------------------------------------------------------------- MultiIndex

MultiIndex MultiIndex::from_labels(std::initializer_list<int> labels) {
  return from_labels(std::vector<int>(labels));
}

MultiIndex MultiIndex::from_labels(const std::vector<int>& labels) {
  std::uint8_t mask = 0;
  int prev = 0;
  for (int l : labels) {
    if (l < 1 || l > kDim) fail_parse("multi_index", "label out of range 1..7");
    if (l <= prev) fail_parse("multi_index", "labels must be strictly increasing");
    mask |= static_cast<std::uint8_t>(1u << (l - 1));
    prev = l;
  }
  return MultiIndex(mask);
}

int MultiIndex::grade() const { return std::popcount(mask_); }

std::vector<int> MultiIndex::labels() const {
  std::vector<int> out;
  for (int i = 0; i < kDim; ++i)
    if ((mask_ >> i) & 1u) out.push_back(i + 1);
  return out;
}

int MultiIndex::rank() const { return tables().rank[mask_]; }

std::string MultiIndex::to_string() const {
  std::string s;
  for (int l : labels()) s += static_cast<char>('0' + l);
  return s;
}

std::strong_ordering operator<=>(MultiIndex a, MultiIndex b) {
  if (auto c = a.grade() <=> b.grade(); c != 0) return c;
  return a.rank() <=> b.rank();
}

const std::vector<MultiIndex>& basis(int grade) {
  check_grade(grade, "basis");
  return tables().by_grade[grade];
}

int basis_size(int grade) { return static_cast<int>(basis(grade).size()); }

int merge_sign(MultiIndex a, MultiIndex b) {
  if (a.mask() & b.mask()) return 0;
  int inversions = 0;
  for (int y = 0; y < kDim; ++y) {
    if (!((b.mask() >> y) & 1u)) continue;
    inversions += std::popcount(static_cast<unsigned>(a.mask() & (0x7fu << (y + 1)) & 0x7fu));
  }
  return (inversions & 1) ? -1 : 1;
}

// --------------------------------------------------------------------- KForm

KForm::KForm(int grade) : grade_(grade) { check_grade(grade, "kform"); }

KForm KForm::scalar(double value) {
  KForm f(0);
  f.add_term(MultiIndex(), value);
  return f;
}

KForm KForm::monomial(MultiIndex index, double value) {
  KForm f(index.grade());
  f.add_term(index, value);
  return f;
}

KForm KForm::from_terms(int grade,
                        std::initializer_list<std::pair<std::initializer_list<int>, double>> terms) {
  std::vector<std::pair<std::vector<int>, double>> v;
  for (const auto& [labels, value] : terms) v.emplace_back(std::vector<int>(labels), value);
  return from_terms(grade, v);
}

KForm KForm::from_terms(int grade, const std::vector<std::pair<std::vector<int>, double>>& terms) {
  KForm f(grade);
  for (auto [labels, value] : terms) {
    if (static_cast<int>(labels.size()) != grade) fail_parse("kform", "term length differs from grade");
    for (int l : labels)
      if (l < 1 || l > kDim) fail_parse("kform", "label out of range 1..7");
    const int sign = permutation_sign(labels);
    if (sign == 0) continue;
    f.add_term(MultiIndex::from_labels(labels), sign * value);
  }
  return f;
}

KForm KForm::from_vector(int grade, const Eigen::VectorXd& coords) {
  const auto& b = basis(grade);
  if (coords.size() != static_cast<Eigen::Index>(b.size()))
    fail_precondition("kform", "coordinate vector has wrong length");
  KForm f(grade);
  for (std::size_t n = 0; n < b.size(); ++n) f.add_term(b[n], coords[static_cast<Eigen::Index>(n)]);
  return f;
}

void KForm::check_index(MultiIndex index) const {
  if (index.grade() != grade_) fail_precondition("kform", "multi-index grade differs from form grade");
}

double KForm::coeff(MultiIndex index) const {
  auto it = terms_.find(index);
  return it == terms_.end() ? 0.0 : it->second;
}

double KForm::coeff(std::initializer_list<int> labels) const {
  return coeff(MultiIndex::from_labels(labels));
}

void KForm::add_term(MultiIndex index, double value) {
  check_index(index);
  auto [it, inserted] = terms_.try_emplace(index, value);
  if (!inserted) it->second += value;
  if (std::abs(it->second) < tol::kZero) terms_.erase(it);
}

Eigen::VectorXd KForm::to_vector() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(basis_size(grade_));
  for (const auto& [idx, value] : terms_) v[idx.rank()] = value;
  return v;
}

double KForm::max_abs() const {
  double m = 0.0;
  for (const auto& [idx, value] : terms_) m = std::max(m, std::abs(value));
  return m;
}

KForm& KForm::operator+=(const KForm& other) {
  if (other.grade_ != grade_) fail_precondition("kform", "adding forms of different grade");
  for (const auto& [idx, value] : other.terms_) add_term(idx, value);
  return *this;
}

KForm& KForm::operator-=(const KForm& other) {
  if (other.grade_ != grade_) fail_precondition("kform", "subtracting forms of different grade");
  for (const auto& [idx, value] : other.terms_) add_term(idx, -value);
  return *this;
}

KForm& KForm::operator*=(double s) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (std::abs(it->second) < tol::kZero)
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

std::string KForm::to_string(int precision) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os << std::setprecision(precision);
  bool first = true;
  for (const auto& [idx, value] : terms_) {
    const double mag = std::abs(value);
    if (first)
      os << (value < 0 ? "-" : "");
    else
      os << (value < 0 ? " - " : " + ");
    first = false;
    const bool unit = std::abs(mag - 1.0) < 1e-14;
    if (grade_ == 0) {
      os << mag;
      continue;
    }
    if (!unit) os << mag << " ";
    os << "e^{" << idx.to_string() << "}";
  }
  return os.str();
}

double max_abs_diff(const KForm& a, const KForm& b) { return (a - b).max_abs(); }

// ---------------------------------------------------------------- operations

KForm wedge(const KForm& a, const KForm& b) {
  const int grade = a.grade() + b.grade();
  if (grade > kDim) return KForm(kDim);
  KForm out(grade);
  for (const auto& [ia, va] : a.terms()) {
    for (const auto& [ib, vb] : b.terms()) {
      const int s = merge_sign(ia, ib);
      if (s == 0) continue;
      out.add_term(MultiIndex::from_mask(ia.mask() | ib.mask()), s * va * vb);
    }
  }
  return out;
}

KForm interior(const Vector7& v, const KForm& a) {
  if (a.grade() == 0) return KForm(0);
  KForm out(a.grade() - 1);
  for (const auto& [idx, value] : a.terms()) {
    int pos = 0;
    for (int l : idx.labels()) {
      const double vl = v[l - 1];
      if (vl != 0.0) {
        const auto rest = MultiIndex::from_mask(static_cast<std::uint8_t>(idx.mask() & ~(1u << (l - 1))));
        out.add_term(rest, ((pos & 1) ? -1.0 : 1.0) * vl * value);
      }
      ++pos;
    }
  }
  return out;
}

double minor_det(const Matrix7& m, MultiIndex rows, MultiIndex cols) {
  const auto r = rows.labels();
  const auto c = cols.labels();
  const auto k = static_cast<Eigen::Index>(r.size());
  if (k == 0) return 1.0;
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = m(r[i] - 1, c[j] - 1);
  return sub.determinant();
}

KForm pullback(const Endomorphism& h, const KForm& a) {
  // h^* e^I = sum_J det(h[I, J]) e^J.
  KForm out(a.grade());
  const auto& targets = basis(a.grade());
  for (const auto& [idx, value] : a.terms()) {
    for (MultiIndex j : targets) out.add_term(j, value * minor_det(h, idx, j));
  }
  return out;
}

KForm gl_action(const Endomorphism& h, const KForm& a) {
  Eigen::FullPivLU<Matrix7> lu(h);
  if (std::abs(lu.determinant()) <= tol::kZero) fail_precondition("gl_action", "non-invertible endomorphism");
  return pullback(lu.inverse(), a);
}

KForm theta(const Endomorphism& a_mat, const KForm& a) {
  // theta(A) e^i = -sum_j A(i, j) e^j, extended as a derivation.
  KForm out(a.grade());
  for (const auto& [idx, value] : a.terms()) {
    int pos = 0;
    for (int i : idx.labels()) {
      const auto rest = MultiIndex::from_mask(static_cast<std::uint8_t>(idx.mask() & ~(1u << (i - 1))));
      const double pos_sign = (pos & 1) ? -1.0 : 1.0;
      for (int j = 1; j <= kDim; ++j) {
        const double aij = a_mat(i - 1, j - 1);
        if (aij == 0.0 || rest.contains(j)) continue;
        const auto single = MultiIndex::from_mask(static_cast<std::uint8_t>(1u << (j - 1)));
        const int s = merge_sign(single, rest);
        out.add_term(MultiIndex::from_mask(rest.mask() | single.mask()), -pos_sign * s * aij * value);
      }
      ++pos;
    }
  }
  return out;
}

double form_inner_product(const KForm& a, const KForm& b, const BilinearForm& g) {
  if (a.grade() != b.grade()) fail_precondition("form_inner_product", "grade mismatch");
  require_spd(g, "form_inner_product");
  const Matrix7 ginv = g.inverse();
  double sum = 0.0;
  for (const auto& [ia, va] : a.terms())
    for (const auto& [ib, vb] : b.terms()) sum += va * vb * minor_det(ginv, ia, ib);
  return sum;
}

KForm hodge_star(const KForm& a, const BilinearForm& g, const KForm& vol) {
  require_spd(g, "hodge_star");
  if (vol.grade() != kDim) fail_precondition("hodge_star", "volume form must have grade 7");
  const double v = vol.coeff(MultiIndex::full());
  const double expected = std::sqrt(g.determinant());
  if (std::abs(std::abs(v) - expected) > tol::kCompare * std::max(1.0, expected))
    fail_precondition("hodge_star", "volume form inconsistent with metric");
  const Matrix7 ginv = g.inverse();
  KForm out(kDim - a.grade());
  // e^K ^ *e^I = det(g^{-1}[K, I]) vol picks out the e^{K^c} coefficient.
  for (const auto& [idx, value] : a.terms()) {
    for (MultiIndex k : basis(a.grade())) {
      const double m = minor_det(ginv, k, idx);
      if (m == 0.0) continue;
      const MultiIndex kc = k.complement();
      out.add_term(kc, merge_sign(k, kc) * v * m * value);
    }
  }
  return out;
}

Eigen::VectorXd gl_coordinates(const Matrix7& a) {
  Eigen::VectorXd v(kDim * kDim);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) v[kDim * i + j] = a(i, j);
  return v;
}

Matrix7 gl_from_coordinates(const Eigen::VectorXd& coords) {
  if (coords.size() != kDim * kDim) fail_precondition("gl_from_coordinates", "expected 49 coordinates");
  Matrix7 a;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) a(i, j) = coords[kDim * i + j];
  return a;
}

Eigen::MatrixXd theta_matrix(const KForm& a) {
  Eigen::MatrixXd m(basis_size(a.grade()), kDim * kDim);
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      Matrix7 e = Matrix7::Zero();
      e(i, j) = 1.0;
      m.col(kDim * i + j) = theta(e, a).to_vector();
    }
  }
  return m;
}

}  // namespace g2flow
