#pragma once

#include <functional>
#include <string>
#include <vector>

#include "g2flow/g2_structure.hpp"
#include "g2flow/lie_algebra.hpp"
#include "g2flow/soliton.hpp"
#include "g2flow/types.hpp"

namespace g2flow {

struct FlowDiagnostics {
  double jacobi_residual = 0.0;
  double bracket_norm = 0.0;  // max-norm of the structure constants
  double torsion_norm = 0.0;  // |T|_g
  double scalar_curvature = 0.0;
};

struct FlowState {
  double t = 0.0;
  StructureConstants mu;
  FlowDiagnostics diagnostics;
};

struct FlowResult {
  std::vector<FlowState> states;
  bool completed = true;
  std::string stop_reason;  // empty when completed
};

struct FlowGuards {
  double max_jacobi = tol::kFatal;
  double max_bracket_norm = 1e6;
};

/// Bracket flow d/dt mu = -delta_mu(Q_mu) for a fixed G2-structure. The
/// pseudo-inverse of theta(.) psi and the torsion system are factorized once.
class BracketFlow {
 public:
  explicit BracketFlow(const G2Structure& g2, FlowGuards guards = {});

  const G2Structure& structure() const { return g2_; }

  /// Minimum-norm Q with theta(Q) psi = Delta_mu psi.
  Endomorphism q_of_mu(const StructureConstants& mu) const;
  StructureConstants velocity(const StructureConstants& mu) const;
  FlowDiagnostics diagnostics(const StructureConstants& mu) const;

  /// Fixed-step RK4 from t = 0 to t_end (backward when t_end < 0). The step
  /// is t_end / n with n = ceil(|t_end| / dt). On a guard violation the run
  /// stops and the last good state is kept.
  FlowResult integrate(const StructureConstants& mu0, double t_end, double dt) const;

 private:
  G2Structure g2_;
  QSolver q_solver_;
  TorsionSolver torsion_;
  FlowGuards guards_;
};

Endomorphism Q_of_mu(const StructureConstants& mu, const G2Structure& g2);

/// max over states of |mu_t - c_fun(t) mu_0|_inf, mu_0 the first state.
double compare_scalar_family(const std::vector<FlowState>& traj, const std::function<double(double)>& c_fun);

/// min over real k of |mu - k mu0|_inf.
double distance_to_scalar_family(const StructureConstants& mu, const StructureConstants& mu0);

}  // namespace g2flow
