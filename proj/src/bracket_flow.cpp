#include "g2flow/bracket_flow.hpp"

#include <cmath>
#include <sstream>

#include "g2flow/curvature.hpp"
#include "g2flow/error.hpp"

namespace g2flow {

BracketFlow::BracketFlow(const G2Structure& g2, FlowGuards guards)
    : g2_(g2), q_solver_(g2.psi()), torsion_(g2), guards_(guards) {}

Endomorphism BracketFlow::q_of_mu(const StructureConstants& mu) const {
  return q_solver_.solve(hodge_laplacian(g2_.psi(), g2_, mu));
}

StructureConstants BracketFlow::velocity(const StructureConstants& mu) const {
  return -1.0 * delta(mu, q_of_mu(mu));
}

FlowDiagnostics BracketFlow::diagnostics(const StructureConstants& mu) const {
  FlowDiagnostics d;
  d.jacobi_residual = jacobi_residual(mu);
  d.bracket_norm = mu.max_abs();
  const TorsionForms tf = torsion_.solve(mu);
  const Matrix7& ginv = g2_.metric_inverse();
  d.torsion_norm = std::sqrt(std::max(0.0, (ginv * tf.T * ginv * tf.T.transpose()).trace()));
  d.scalar_curvature = ricci(mu, g2_.metric()).scalar;
  return d;
}

FlowResult BracketFlow::integrate(const StructureConstants& mu0, double t_end, double dt) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail_precondition("integrate", "dt must be positive");
  if (!std::isfinite(t_end)) fail_precondition("integrate", "t_end must be finite");
  if (jacobi_residual(mu0) > guards_.max_jacobi) fail_precondition("integrate", "initial bracket violates Jacobi");

  FlowResult out;
  out.states.push_back({0.0, mu0, diagnostics(mu0)});
  const long n = static_cast<long>(std::ceil(std::abs(t_end) / dt - 1e-9));
  if (n == 0) return out;
  const double h = t_end / static_cast<double>(n);

  StructureConstants mu = mu0;
  for (long step = 1; step <= n; ++step) {
    const StructureConstants k1 = velocity(mu);
    const StructureConstants k2 = velocity(mu + (0.5 * h) * k1);
    const StructureConstants k3 = velocity(mu + (0.5 * h) * k2);
    const StructureConstants k4 = velocity(mu + h * k3);
    const StructureConstants next = mu + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = h * static_cast<double>(step);

    const double norm = next.max_abs();
    std::string reason;
    if (!std::isfinite(norm) || norm > guards_.max_bracket_norm) {
      reason = "bracket norm exceeded guard";
    } else if (jacobi_residual(next) > guards_.max_jacobi) {
      reason = "Jacobi residual exceeded guard";
    }
    if (!reason.empty()) {
      std::ostringstream msg;
      msg << reason << " at t = " << t;
      out.completed = false;
      out.stop_reason = msg.str();
      return out;
    }
    mu = next;
    out.states.push_back({t, mu, diagnostics(mu)});
  }
  return out;
}

Endomorphism Q_of_mu(const StructureConstants& mu, const G2Structure& g2) {
  return solve_Q(g2.psi(), hodge_laplacian(g2.psi(), g2, mu));
}

double compare_scalar_family(const std::vector<FlowState>& traj, const std::function<double(double)>& c_fun) {
  if (traj.empty()) fail_precondition("compare_scalar_family", "empty trajectory");
  const StructureConstants& mu0 = traj.front().mu;
  double worst = 0.0;
  for (const FlowState& s : traj) worst = std::max(worst, max_abs_diff(s.mu, c_fun(s.t) * mu0));
  return worst;
}

double distance_to_scalar_family(const StructureConstants& mu, const StructureConstants& mu0) {
  const double n0 = mu0.max_abs();
  if (n0 == 0.0) return mu.max_abs();
  // f(k) = |mu - k mu0| is convex and f(k) > f(0) once |k| n0 > 2 |mu|.
  double lo = -2.0 * mu.max_abs() / n0;
  double hi = -lo;
  auto f = [&](double k) { return max_abs_diff(mu, k * mu0); };
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2))
      hi = m2;
    else
      lo = m1;
  }
  return std::min(f(0.5 * (lo + hi)), f(0.0));
}

}  // namespace g2flow
