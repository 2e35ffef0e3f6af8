#include "g2flow/g2_structure.hpp"

#include <array>
#include <cmath>
#include <optional>

#include <unsupported/Eigen/MatrixFunctions>

#include "g2flow/error.hpp"

namespace g2flow {

namespace {

using Tensor3 = std::array<std::array<std::array<double, kDim>, kDim>, kDim>;

// Fully antisymmetric components phi_{ijk} (0-based) of a 3-form.
Tensor3 components(const KForm& phi) {
  Tensor3 t{};
  for (const auto& [idx, value] : phi.terms()) {
    const auto l = idx.labels();
    const int a = l[0] - 1, b = l[1] - 1, c = l[2] - 1;
    t[a][b][c] = t[b][c][a] = t[c][a][b] = value;
    t[b][a][c] = t[a][c][b] = t[c][b][a] = -value;
  }
  return t;
}

BilinearForm two_form_matrix(const KForm& a) {
  BilinearForm m = BilinearForm::Zero();
  for (const auto& [idx, value] : a.terms()) {
    const auto l = idx.labels();
    m(l[0] - 1, l[1] - 1) = value;
    m(l[1] - 1, l[0] - 1) = -value;
  }
  return m;
}

double residual_inf(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  return (a * x - b).cwiseAbs().maxCoeff();
}

}  // namespace

// --------------------------------------------------------------- metric/G2

MetricData metric_from_phi(const KForm& phi) {
  if (phi.grade() != 3) fail_precondition("metric_from_phi", "expected a 3-form");
  std::array<KForm, kDim> contractions;
  for (int i = 0; i < kDim; ++i) contractions[i] = interior(Vector7::Unit(i), phi);
  BilinearForm b;
  for (int i = 0; i < kDim; ++i) {
    const KForm left = wedge(contractions[i], phi);
    for (int j = i; j < kDim; ++j) {
      b(i, j) = b(j, i) = wedge(contractions[j], left).coeff(MultiIndex::full()) / 6.0;
    }
  }
  MetricData out;
  double sign = 1.0;
  if (Eigen::LLT<Matrix7>(b).info() != Eigen::Success) {
    if (Eigen::LLT<Matrix7>(-b).info() != Eigen::Success)
      fail_precondition("metric_from_phi", "3-form is not positive/nondegenerate");
    sign = -1.0;
    b = -b;
    out.orientation_flipped = true;
  }
  const double det = b.determinant();
  out.metric = std::pow(det, -1.0 / 9.0) * b;
  out.vol = KForm::monomial(MultiIndex::full(), sign * std::pow(det, 1.0 / 9.0));
  return out;
}

G2Structure G2Structure::from_phi(const KForm& phi) {
  MetricData md = metric_from_phi(phi);
  G2Structure g;
  g.phi_ = phi;
  g.metric_ = md.metric;
  g.metric_inv_ = md.metric.inverse();
  g.vol_ = md.vol;
  g.flipped_ = md.orientation_flipped;
  g.psi_ = g.star(phi);
  return g;
}

G2Structure G2Structure::from_psi(const KForm& psi, const KForm& phi_guess, int max_iterations) {
  if (psi.grade() != 4) fail_precondition("from_psi", "expected a 4-form");
  G2Structure g = from_phi(phi_guess);
  const double scale = std::max(1.0, psi.max_abs());
  double residual = max_abs_diff(psi, g.psi());
  for (int it = 0; it < max_iterations && residual > 1e-14 * scale; ++it) {
    // theta(delta) psi_k = psi - psi_k, then phi_{k+1} = exp(delta) . phi_k.
    const Eigen::MatrixXd m = theta_matrix(g.psi());
    const Eigen::VectorXd rhs = (psi - g.psi()).to_vector();
    const Matrix7 step = gl_from_coordinates(m.completeOrthogonalDecomposition().solve(rhs));
    bool improved = false;
    for (double damping = 1.0; damping > 1e-3 && !improved; damping *= 0.5) {
      const Matrix7 h = (damping * step).exp();
      std::optional<G2Structure> next;
      try {
        next = from_phi(gl_action(h, g.phi()));
      } catch (const Error&) {
        continue;  // left the positive orbit; shorten the step
      }
      const double next_residual = max_abs_diff(psi, next->psi());
      if (next_residual < residual) {
        g = std::move(*next);
        residual = next_residual;
        improved = true;
      }
    }
    if (!improved) break;
  }
  if (residual > 1e-10 * scale) fail_residual("from_psi", "4-form is not in the G2 orbit of the guess");
  return g;
}

// -------------------------------------------------------------- Bryant maps

KForm bryant_i(const BilinearForm& h, const G2Structure& g2) {
  const Tensor3 p = components(g2.phi());
  const Matrix7 hg = h * g2.metric_inverse();  // hg(i, m) = h_il g^lm
  // A_ijk = hg(i, m) phi_mjk; coefficient of e^{abc} is A_abc + A_bca + A_cab.
  auto a_comp = [&](int i, int j, int k) {
    double s = 0.0;
    for (int m = 0; m < kDim; ++m) s += hg(i, m) * p[m][j][k];
    return s;
  };
  KForm out(3);
  for (MultiIndex idx : basis(3)) {
    const auto l = idx.labels();
    const int a = l[0] - 1, b = l[1] - 1, c = l[2] - 1;
    out.add_term(idx, a_comp(a, b, c) + a_comp(b, c, a) + a_comp(c, a, b));
  }
  return out;
}

BilinearForm bryant_j(const KForm& eta, const G2Structure& g2) {
  if (eta.grade() != 3) fail_precondition("bryant_j", "expected a 3-form");
  std::array<KForm, kDim> contractions;
  for (int i = 0; i < kDim; ++i) contractions[i] = interior(Vector7::Unit(i), g2.phi());
  const double vol = g2.vol().coeff(MultiIndex::full());
  BilinearForm j;
  for (int u = 0; u < kDim; ++u) {
    const KForm right = wedge(contractions[u], eta);
    for (int v = u; v < kDim; ++v) {
      // (e_u ⌟ phi) and (e_v ⌟ phi) are 2-forms and commute.
      j(u, v) = j(v, u) = wedge(contractions[v], right).coeff(MultiIndex::full()) / vol;
    }
  }
  return j;
}

BryantInverse::BryantInverse(const G2Structure& g2) : system_(basis_size(3) + 1, 28) {
  const Matrix7& ginv = g2.metric_inverse();
  int col = 0;
  for (int a = 0; a < kDim; ++a) {
    for (int b = a; b < kDim; ++b) {
      BilinearForm s = BilinearForm::Zero();
      s(a, b) = s(b, a) = 1.0;
      system_.col(col).head(basis_size(3)) = bryant_i(s, g2).to_vector();
      system_(basis_size(3), col) = (a == b ? 1.0 : 2.0) * ginv(a, b);
      ++col;
    }
  }
  cod_.compute(system_);
}

BilinearForm BryantInverse::solve(const KForm& tau3, double& residual) const {
  if (tau3.grade() != 3) fail_precondition("tau27_from_tau3", "expected a 3-form");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system_.rows());
  rhs.head(basis_size(3)) = tau3.to_vector();
  const Eigen::VectorXd x = cod_.solve(rhs);
  residual = residual_inf(system_, x, rhs);
  BilinearForm h;
  int col = 0;
  for (int a = 0; a < kDim; ++a)
    for (int b = a; b < kDim; ++b) h(a, b) = h(b, a) = x[col++];
  return h;
}

BilinearForm tau27_from_tau3(const KForm& tau3, const G2Structure& g2) {
  double residual = 0.0;
  BilinearForm h = BryantInverse(g2).solve(tau3, residual);
  if (residual >= tol::kFatal) fail_residual("tau27_from_tau3", "3-form is not in the image of i on traceless tensors");
  return h;
}

// ------------------------------------------------------------- torsion forms

namespace {

// Unknown layout: tau0 | tau1 (7) | tau2 (21) | tau3 (35).
constexpr int kTau1 = 1, kTau2 = 8, kTau3 = 29, kUnknowns = 64;
// Row layout: d phi (35) | d psi (21) | tau2^psi (7) | *(phi^tau2)+tau2 (21) |
// tau3^phi (7) | tau3^psi (1).
constexpr int kRowDphi = 0, kRowDpsi = 35, kRowT2psi = 56, kRowT2star = 63, kRowT3phi = 84, kRowT3psi = 91,
              kRows = 92;

}  // namespace

TorsionSolver::TorsionSolver(const G2Structure& g2)
    : g2_(g2), system_(Eigen::MatrixXd::Zero(kRows, kUnknowns)), bryant_inverse_(g2) {
  const KForm& phi = g2_.phi();
  const KForm& psi = g2_.psi();
  system_.col(0).segment(kRowDphi, 35) = psi.to_vector();
  for (int n = 0; n < 7; ++n) {
    const KForm e = KForm::monomial(basis(1)[n]);
    system_.col(kTau1 + n).segment(kRowDphi, 35) = (3.0 * wedge(e, phi)).to_vector();
    system_.col(kTau1 + n).segment(kRowDpsi, 21) = (4.0 * wedge(e, psi)).to_vector();
  }
  for (int n = 0; n < 21; ++n) {
    const KForm e = KForm::monomial(basis(2)[n]);
    auto col = system_.col(kTau2 + n);
    col.segment(kRowDpsi, 21) = g2_.star(e).to_vector();
    col.segment(kRowT2psi, 7) = wedge(e, psi).to_vector();
    col.segment(kRowT2star, 21) = (g2_.star(wedge(phi, e)) + e).to_vector();
  }
  for (int n = 0; n < 35; ++n) {
    const KForm e = KForm::monomial(basis(3)[n]);
    auto col = system_.col(kTau3 + n);
    col.segment(kRowDphi, 35) = g2_.star(e).to_vector();
    col.segment(kRowT3phi, 7) = wedge(e, phi).to_vector();
    col.segment(kRowT3psi, 1) = wedge(e, psi).to_vector();
  }
  cod_.compute(system_);
}

TorsionForms TorsionSolver::decompose(const KForm& dphi, const KForm& dpsi) const {
  if (dphi.grade() != 4 || dpsi.grade() != 5) fail_precondition("torsion_forms", "expected d phi and d psi");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(kRows);
  rhs.segment(kRowDphi, 35) = dphi.to_vector();
  rhs.segment(kRowDpsi, 21) = dpsi.to_vector();
  const Eigen::VectorXd x = cod_.solve(rhs);

  TorsionForms tf;
  tf.tau0 = std::abs(x[0]) < tol::kZero ? 0.0 : x[0];
  tf.tau1 = KForm::from_vector(1, x.segment(kTau1, 7));
  tf.tau2 = KForm::from_vector(2, x.segment(kTau2, 21));
  tf.tau3 = KForm::from_vector(3, x.segment(kTau3, 35));
  double i_residual = 0.0;
  tf.tau27 = bryant_inverse_.solve(tf.tau3, i_residual);
  tf.residual = std::max(residual_inf(system_, x, rhs), i_residual);
  tf.T = full_torsion(tf, g2_);
  return tf;
}

TorsionForms TorsionSolver::solve(const StructureConstants& mu) const {
  return decompose(ce_differential(mu, g2_.phi()), ce_differential(mu, g2_.psi()));
}

TorsionForms torsion_forms(const G2Structure& g2, const StructureConstants& mu) {
  TorsionForms tf = TorsionSolver(g2).solve(mu);
  if (tf.residual >= tol::kFatal)
    fail_residual("torsion_forms", "dphi/dpsi not decomposable - phi is not a G2-structure for this bracket");
  return tf;
}

BilinearForm full_torsion(const TorsionForms& tf, const G2Structure& g2) {
  const Vector7 sharp = g2.metric_inverse() * tf.tau1.to_vector();
  return tf.tau0 / 4.0 * g2.metric() - tf.tau27 + two_form_matrix(interior(sharp, g2.phi())) -
         0.5 * two_form_matrix(tf.tau2);
}

// ---------------------------------------------------------------- Laplacian

KForm codifferential(const KForm& a, const G2Structure& g2, const StructureConstants& mu) {
  if (a.grade() == 0) return KForm(0);
  const double sign = (a.grade() & 1) ? -1.0 : 1.0;
  return sign * g2.star(ce_differential(mu, g2.star(a)));
}

KForm hodge_laplacian(const KForm& a, const G2Structure& g2, const StructureConstants& mu) {
  KForm out(a.grade());
  if (a.grade() > 0) out += ce_differential(mu, codifferential(a, g2, mu));
  if (a.grade() < kDim) out += codifferential(ce_differential(mu, a), g2, mu);
  return out;
}

KForm coclosed_laplacian(const TorsionForms& tf, const G2Structure& g2, const StructureConstants& mu) {
  return tf.tau0 * tf.tau0 * g2.psi() + tf.tau0 * g2.star(tf.tau3) + ce_differential(mu, tf.tau3);
}

std::vector<std::string> TorsionClass::labels() const {
  if (torsion_free()) return {"torsion-free"};
  if (nearly_parallel()) return {"nearly parallel"};
  if (coclosed()) return {"coclosed"};
  return {};
}

TorsionClass torsion_class(const TorsionForms& tf, double tolerance) {
  TorsionClass c;
  c.tau0_zero = std::abs(tf.tau0) < tolerance;
  c.tau1_zero = tf.tau1.max_abs() < tolerance;
  c.tau2_zero = tf.tau2.max_abs() < tolerance;
  c.tau3_zero = tf.tau3.max_abs() < tolerance;
  return c;
}

}  // namespace g2flow
