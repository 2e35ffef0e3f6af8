#include "g2flow/soliton.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "g2flow/error.hpp"

namespace g2flow {

namespace {

int kernel_dimension(const Eigen::MatrixXd& m, Eigen::MatrixXd* kernel) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index n = 0; n < sv.size(); ++n)
    if (sv[n] > tol::kRank) ++rank;
  const int dim = static_cast<int>(m.cols()) - rank;
  if (kernel) *kernel = svd.matrixV().rightCols(dim);
  return dim;
}

void require_g2_form(const KForm& psi, const char* stage) {
  if (psi.grade() != 4) fail_precondition(stage, "expected a 4-form");
  if (kernel_dimension(theta_matrix(psi), nullptr) != kG2Dimension)
    fail_precondition(stage, "psi is not a G2 4-form");
}

SolitonSolution finish(double c, const Endomorphism& d, const KForm& psi, const KForm& lap,
                       const StructureConstants& mu, int rank, int unknowns) {
  SolitonSolution sol;
  sol.c = c;
  sol.lambda = 4.0 * c;
  sol.D = d;
  sol.Q = c * Endomorphism::Identity() + d;
  sol.residual = max_abs_diff(theta(sol.Q, psi), lap);
  sol.derivation_residual = derivation_residual(mu, d);
  sol.rank = rank;
  sol.unknowns = unknowns;
  return sol;
}

}  // namespace

std::vector<Endomorphism> stabilizer_algebra(const KForm& psi) {
  if (psi.grade() != 4) fail_precondition("stabilizer_algebra", "expected a 4-form");
  Eigen::MatrixXd kernel;
  const int dim = kernel_dimension(theta_matrix(psi), &kernel);
  if (dim != kG2Dimension) fail_precondition("stabilizer_algebra", "psi is not a G2 4-form");
  std::vector<Endomorphism> out;
  for (int n = 0; n < dim; ++n) out.push_back(gl_from_coordinates(kernel.col(n)));
  return out;
}

// -------------------------------------------------------------------- QSolver

QSolver::QSolver(const KForm& psi) : psi_(psi), theta_(theta_matrix(psi)) {
  require_g2_form(psi, "solve_Q");
  pinv_ = theta_.completeOrthogonalDecomposition().pseudoInverse();
}

Endomorphism QSolver::solve(const KForm& laplacian) const {
  if (laplacian.grade() != 4) fail_precondition("solve_Q", "expected a 4-form");
  return gl_from_coordinates(pinv_ * laplacian.to_vector());
}

double QSolver::residual(const Endomorphism& q, const KForm& laplacian) const {
  return (theta_ * gl_coordinates(q) - laplacian.to_vector()).cwiseAbs().maxCoeff();
}

Endomorphism solve_Q(const KForm& psi, const KForm& laplacian) {
  const QSolver solver(psi);
  Endomorphism q = solver.solve(laplacian);
  if (solver.residual(q, laplacian) >= tol::kCompare) fail_residual("solve_Q", "theta(.) psi = Delta psi is inconsistent");
  return q;
}

// ------------------------------------------------------------- ansatz parsing

DiagonalAnsatz DiagonalAnsatz::parse(const std::string& pattern) {
  DiagonalAnsatz a;
  a.pattern_ = pattern;
  std::stringstream ss(pattern);
  std::string tok;
  int slot = 0;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char ch) { return std::isspace(ch); }), tok.end());
    if (tok.empty()) fail_parse("ansatz", "empty entry in pattern");
    if (slot >= kDim) fail_parse("ansatz", "pattern has more than 7 entries");
    if (std::isalpha(static_cast<unsigned char>(tok[0]))) {
      auto it = std::find(a.variables_.begin(), a.variables_.end(), tok);
      if (it == a.variables_.end()) {
        a.variables_.push_back(tok);
        it = a.variables_.end() - 1;
      }
      a.slot_variable_[slot] = static_cast<int>(it - a.variables_.begin());
      a.slot_constant_[slot] = 0.0;
    } else {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        fail_parse("ansatz", "cannot read entry '" + tok + "'");
      }
      if (used != tok.size()) fail_parse("ansatz", "cannot read entry '" + tok + "'");
      a.slot_variable_[slot] = -1;
      a.slot_constant_[slot] = v;
    }
    ++slot;
  }
  if (slot != kDim) fail_parse("ansatz", "pattern must have exactly 7 entries");
  return a;
}

Endomorphism DiagonalAnsatz::variable_matrix(int n) const {
  Endomorphism m = Endomorphism::Zero();
  for (int i = 0; i < kDim; ++i)
    if (slot_variable_[i] == n) m(i, i) = 1.0;
  return m;
}

Endomorphism DiagonalAnsatz::constant_matrix() const {
  Endomorphism m = Endomorphism::Zero();
  for (int i = 0; i < kDim; ++i)
    if (slot_variable_[i] < 0) m(i, i) = slot_constant_[i];
  return m;
}

// ------------------------------------------------------------ soliton solves

std::optional<SolitonSolution> solve_algebraic_soliton(const G2Structure& g2, const StructureConstants& mu,
                                                       const DerivationBasis& der, double tolerance) {
  const KForm& psi = g2.psi();
  const KForm lap = hodge_laplacian(psi, g2, mu);
  Eigen::MatrixXd m(basis_size(4), 1 + der.dim());
  m.col(0) = theta(Endomorphism::Identity(), psi).to_vector();
  for (int n = 0; n < der.dim(); ++n) m.col(1 + n) = theta(der.basis[n], psi).to_vector();
  const auto cod = m.completeOrthogonalDecomposition();
  const Eigen::VectorXd x = cod.solve(lap.to_vector());

  Endomorphism d = Endomorphism::Zero();
  for (int n = 0; n < der.dim(); ++n) d += x[1 + n] * der.basis[n];
  SolitonSolution sol = finish(x[0], d, psi, lap, mu, static_cast<int>(cod.rank()), static_cast<int>(m.cols()));
  if (sol.residual >= tolerance) return std::nullopt;
  return sol;
}

std::optional<SolitonSolution> solve_algebraic_soliton(const G2Structure& g2, const StructureConstants& mu,
                                                       const DiagonalAnsatz& ansatz, double tolerance) {
  const KForm& psi = g2.psi();
  const KForm lap = hodge_laplacian(psi, g2, mu);
  const int nv = static_cast<int>(ansatz.variables().size());
  Eigen::MatrixXd m(basis_size(4), 1 + nv);
  m.col(0) = theta(Endomorphism::Identity(), psi).to_vector();
  for (int n = 0; n < nv; ++n) m.col(1 + n) = theta(ansatz.variable_matrix(n), psi).to_vector();
  const Eigen::VectorXd rhs = (lap - theta(ansatz.constant_matrix(), psi)).to_vector();
  const auto cod = m.completeOrthogonalDecomposition();
  const Eigen::VectorXd x = cod.solve(rhs);

  Endomorphism d = ansatz.constant_matrix();
  for (int n = 0; n < nv; ++n) d += x[1 + n] * ansatz.variable_matrix(n);
  SolitonSolution sol = finish(x[0], d, psi, lap, mu, static_cast<int>(cod.rank()), static_cast<int>(m.cols()));
  if (sol.residual >= tolerance || sol.derivation_residual >= tolerance) return std::nullopt;
  return sol;
}

std::vector<LinearEquation> ansatz_system(const G2Structure& g2, const StructureConstants& mu,
                                          const DiagonalAnsatz& ansatz) {
  // Row I of  lambda psi - theta(D) psi = -Delta psi.
  const KForm& psi = g2.psi();
  const Eigen::VectorXd lap = hodge_laplacian(psi, g2, mu).to_vector();
  const Eigen::VectorXd p = psi.to_vector();
  const int nv = static_cast<int>(ansatz.variables().size());
  std::vector<Eigen::VectorXd> cols;
  for (int n = 0; n < nv; ++n) cols.push_back(-theta(ansatz.variable_matrix(n), psi).to_vector());
  const Eigen::VectorXd fixed = -theta(ansatz.constant_matrix(), psi).to_vector();

  std::vector<LinearEquation> out;
  for (int row = 0; row < basis_size(4); ++row) {
    LinearEquation eq;
    for (int n = 0; n < nv; ++n) eq.coeffs.push_back(cols[n][row]);
    eq.lambda_coeff = p[row];
    eq.rhs = -lap[row] - fixed[row];

    double scale = eq.lambda_coeff;
    if (std::abs(scale) < tol::kZero) {
      scale = 0.0;
      for (double c : eq.coeffs)
        if (std::abs(c) > tol::kZero) {
          scale = c;
          break;
        }
    }
    if (scale == 0.0) {
      if (std::abs(eq.rhs) < tol::kZero) continue;  // 0 = 0
      scale = 1.0;
    }
    for (double& c : eq.coeffs) c /= scale;
    eq.lambda_coeff /= scale;
    eq.rhs /= scale;

    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const LinearEquation& o) {
      if (std::abs(o.lambda_coeff - eq.lambda_coeff) > tol::kZero || std::abs(o.rhs - eq.rhs) > tol::kZero) return false;
      for (int n = 0; n < nv; ++n)
        if (std::abs(o.coeffs[n] - eq.coeffs[n]) > tol::kZero) return false;
      return true;
    });
    if (!duplicate) out.push_back(std::move(eq));
  }
  return out;
}

// ------------------------------------------------------ self-similar solution

SelfSimilarTrajectory::SelfSimilarTrajectory(const SolitonSolution& sol, const G2Structure& g2)
    : c_(sol.c), D_(sol.D), Q_(sol.Q), phi0_(g2.phi()), psi0_(g2.psi()) {
  if (sol.residual >= tol::kCompare) fail_precondition("self_similar", "soliton residual too large");
}

void SelfSimilarTrajectory::check(double t) const {
  if (!in_domain(t)) fail_precondition("self_similar", "time outside the domain 2ct + 1 > 0");
}

double SelfSimilarTrajectory::b(double t) const {
  check(t);
  const double u = 2.0 * c_ * t + 1.0;
  return u * u;
}

double SelfSimilarTrajectory::s(double t) const {
  check(t);
  if (c_ == 0.0) return -t;
  return -std::log1p(2.0 * c_ * t) / (2.0 * c_);
}

Endomorphism SelfSimilarTrajectory::h(double t) const { return Endomorphism((s(t) * D_).exp()); }

double SelfSimilarTrajectory::bracket_scale(double t) const {
  check(t);
  return 1.0 / std::sqrt(2.0 * c_ * t + 1.0);
}

KForm SelfSimilarTrajectory::psi(double t) const { return b(t) * gl_action(h(t), psi0_); }

KForm SelfSimilarTrajectory::phi(double t) const { return std::pow(b(t), 0.75) * gl_action(h(t), phi0_); }

Endomorphism SelfSimilarTrajectory::Q(double t) const { return Q_ / std::sqrt(b(t)); }

SelfSimilarTrajectory self_similar(const SolitonSolution& sol, const G2Structure& g2) {
  return SelfSimilarTrajectory(sol, g2);
}

double verify_coflow(const SelfSimilarTrajectory& traj, const StructureConstants& mu, double t, double dt) {
  if (!(dt > 0.0)) fail_precondition("verify_coflow", "dt must be positive");
  if (!traj.in_domain(t - dt) || !traj.in_domain(t + dt))
    fail_precondition("verify_coflow", "time outside the domain 2ct + 1 > 0");
  const KForm psi_t = traj.psi(t);
  const G2Structure g_t = G2Structure::from_psi(psi_t, traj.phi(0.0));
  const KForm lap = hodge_laplacian(g_t.psi(), g_t, mu);
  const KForm derivative = (1.0 / (2.0 * dt)) * (traj.psi(t + dt) - traj.psi(t - dt));
  return (derivative + lap).max_abs();
}

}  // namespace g2flow
