#include "g2flow/lie_algebra.hpp"

#include <algorithm>
#include <cmath>

#include "g2flow/error.hpp"

namespace g2flow {

namespace {

void check_label(int l) {
  if (l < 1 || l > kDim) fail_parse("structure_constants", "label out of range 1..7");
}

MultiIndex single(int i0) { return MultiIndex::from_mask(static_cast<std::uint8_t>(1u << i0)); }

}  // namespace

int pair_index(int i, int j) {
  // Pairs (0,1), (0,2), ..., (0,6), (1,2), ...
  return i * (2 * kDim - i - 1) / 2 + (j - i - 1);
}

StructureConstants::StructureConstants() {
  for (auto& v : pairs_) v.setZero();
}

StructureConstants StructureConstants::from_coordinates(const BracketCoordinates& coords) {
  StructureConstants mu;
  for (int p = 0; p < kPairs; ++p) mu.pairs_[p] = coords.segment<kDim>(kDim * p);
  return mu;
}

void StructureConstants::set(int i, int j, int k, double value) {
  check_label(i);
  check_label(j);
  check_label(k);
  if (i == j) fail_parse("structure_constants", "[e_i, e_i] is zero by antisymmetry");
  if (i < j)
    pairs_[pair_index(i - 1, j - 1)][k - 1] = value;
  else
    pairs_[pair_index(j - 1, i - 1)][k - 1] = -value;
}

double StructureConstants::get(int i, int j, int k) const {
  check_label(i);
  check_label(j);
  check_label(k);
  return bracket_basis(i - 1, j - 1)[k - 1];
}

Vector7 StructureConstants::bracket_basis(int i, int j) const {
  if (i == j) return Vector7::Zero();
  if (i < j) return pairs_[pair_index(i, j)];
  return -pairs_[pair_index(j, i)];
}

Vector7 StructureConstants::bracket(const Vector7& x, const Vector7& y) const {
  Vector7 out = Vector7::Zero();
  for (int i = 0; i < kDim; ++i) {
    for (int j = i + 1; j < kDim; ++j) {
      const double w = x[i] * y[j] - x[j] * y[i];
      if (w != 0.0) out += w * pairs_[pair_index(i, j)];
    }
  }
  return out;
}

BracketCoordinates StructureConstants::coordinates() const {
  BracketCoordinates c;
  for (int p = 0; p < kPairs; ++p) c.segment<kDim>(kDim * p) = pairs_[p];
  return c;
}

double StructureConstants::max_abs() const {
  double m = 0.0;
  for (const auto& v : pairs_) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

StructureConstants& StructureConstants::operator+=(const StructureConstants& o) {
  for (int p = 0; p < kPairs; ++p) pairs_[p] += o.pairs_[p];
  return *this;
}

StructureConstants& StructureConstants::operator-=(const StructureConstants& o) {
  for (int p = 0; p < kPairs; ++p) pairs_[p] -= o.pairs_[p];
  return *this;
}

StructureConstants& StructureConstants::operator*=(double s) {
  for (auto& v : pairs_) v *= s;
  return *this;
}

double max_abs_diff(const StructureConstants& a, const StructureConstants& b) { return (a - b).max_abs(); }

double jacobi_residual(const StructureConstants& mu) {
  double r = 0.0;
  for (int i = 0; i < kDim; ++i) {
    for (int j = i + 1; j < kDim; ++j) {
      for (int k = j + 1; k < kDim; ++k) {
        const Vector7 ei = Vector7::Unit(i), ej = Vector7::Unit(j), ek = Vector7::Unit(k);
        const Vector7 cyc = mu.bracket(mu.bracket_basis(i, j), ek) + mu.bracket(mu.bracket_basis(j, k), ei) +
                            mu.bracket(mu.bracket_basis(k, i), ej);
        r = std::max(r, cyc.cwiseAbs().maxCoeff());
      }
    }
  }
  return r;
}

KForm ce_differential(const StructureConstants& mu, const KForm& a) {
  if (a.grade() == 0 || a.grade() == kDim) return KForm(std::min(a.grade() + 1, kDim));
  // d e^k = -sum_{i<j} c^k_{ij} e^{ij}; d e^I = sum_p (-1)^p d e^{i_p} ^ e^{I \ i_p}.
  KForm out(a.grade() + 1);
  for (const auto& [idx, value] : a.terms()) {
    int pos = 0;
    for (int l : idx.labels()) {
      const int k = l - 1;
      const auto rest = MultiIndex::from_mask(static_cast<std::uint8_t>(idx.mask() & ~(1u << k)));
      const double pos_sign = (pos & 1) ? -1.0 : 1.0;
      for (int i = 0; i < kDim; ++i) {
        if (rest.contains(i + 1)) continue;
        for (int j = i + 1; j < kDim; ++j) {
          if (rest.contains(j + 1)) continue;
          const double c = mu.bracket_basis(i, j)[k];
          if (c == 0.0) continue;
          const auto ij = MultiIndex::from_mask(single(i).mask() | single(j).mask());
          out.add_term(MultiIndex::from_mask(ij.mask() | rest.mask()), -pos_sign * merge_sign(ij, rest) * c * value);
        }
      }
      ++pos;
    }
  }
  return out;
}

StructureConstants almost_abelian(const Eigen::Matrix<double, 6, 6>& a6) {
  StructureConstants mu;
  for (int v = 0; v < 6; ++v)
    for (int k = 0; k < 6; ++k)
      if (a6(k, v) != 0.0) mu.set(7, v + 1, k + 1, a6(k, v));
  return mu;
}

StructureConstants delta(const StructureConstants& mu, const Endomorphism& a) {
  StructureConstants out;
  for (int i = 0; i < kDim; ++i) {
    for (int j = i + 1; j < kDim; ++j) {
      const Vector7 v = -a * mu.bracket_basis(i, j) + mu.bracket(a.col(i), Vector7::Unit(j)) +
                        mu.bracket(Vector7::Unit(i), a.col(j));
      for (int k = 0; k < kDim; ++k) out.set(i + 1, j + 1, k + 1, v[k]);
    }
  }
  return out;
}

double derivation_residual(const StructureConstants& mu, const Endomorphism& d) {
  // D[x,y] - [Dx,y] - [x,Dy] = -delta_mu(D).
  return delta(mu, d).max_abs();
}

Eigen::MatrixXd delta_matrix(const StructureConstants& mu) {
  Eigen::MatrixXd m(kBracketCoords, kDim * kDim);
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      Endomorphism e = Endomorphism::Zero();
      e(i, j) = 1.0;
      m.col(kDim * i + j) = delta(mu, e).coordinates();
    }
  }
  return m;
}

DerivationBasis derivation_space(const StructureConstants& mu) {
  if (jacobi_residual(mu) >= tol::kCompare)
    fail_precondition("derivation_space", "bracket does not satisfy the Jacobi identity");
  const Eigen::MatrixXd m = delta_matrix(mu);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index n = 0; n < sv.size(); ++n)
    if (sv[n] > tol::kRank) ++rank;
  DerivationBasis out;
  for (int n = rank; n < kDim * kDim; ++n) out.basis.push_back(gl_from_coordinates(svd.matrixV().col(n)));
  return out;
}

StructureConstants bracket_action(const Endomorphism& h, const StructureConstants& mu) {
  Eigen::FullPivLU<Matrix7> lu(h);
  if (std::abs(lu.determinant()) <= tol::kZero) fail_precondition("bracket_action", "non-invertible endomorphism");
  const Matrix7 hinv = lu.inverse();
  StructureConstants out;
  for (int i = 0; i < kDim; ++i) {
    for (int j = i + 1; j < kDim; ++j) {
      const Vector7 v = h * mu.bracket(hinv.col(i), hinv.col(j));
      for (int k = 0; k < kDim; ++k) out.set(i + 1, j + 1, k + 1, v[k]);
    }
  }
  return out;
}

}  // namespace g2flow
