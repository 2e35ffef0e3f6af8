// Prints one [PASS]/[FAIL] line per acceptance criterion; exits 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "g2flow/bracket_flow.hpp"
#include "g2flow/curvature.hpp"
#include "g2flow/error.hpp"
#include "g2flow/io.hpp"
#include "g2flow/soliton.hpp"
#include "properties.hpp"

using namespace g2flow;

namespace {

KForm terms(int grade, const std::vector<std::pair<std::vector<int>, double>>& t) { return KForm::from_terms(grade, t); }

Matrix7 diag(std::vector<double> d) {
  Vector7 v;
  for (int n = 0; n < kDim; ++n) v[n] = d[n];
  return v.asDiagonal();
}

double mdiff(const Matrix7& a, const Matrix7& b) { return (a - b).cwiseAbs().maxCoeff(); }

struct Check {
  std::string what;
  double value;
  double limit;
  bool ok() const { return value < limit; }
};

std::string describe(const std::vector<Check>& checks, bool& ok) {
  ok = true;
  std::string s;
  char buf[160];
  for (const Check& c : checks) {
    ok = ok && c.ok();
    std::snprintf(buf, sizeof buf, "%s%s %.3g%s%.0e", s.empty() ? "" : ", ", c.what.c_str(), c.value,
                  c.ok() ? " < " : " >= ", c.limit);
    s += buf;
  }
  return s;
}

struct Golden {
  ProblemSpec p;
  G2Structure g2;
};

int report(int number, const std::string& title, const std::function<std::vector<Check>()>& body) {
  bool ok = false;
  std::string detail;
  try {
    detail = describe(body(), ok);
  } catch (const Error& e) {
    detail = std::string("stage ") + e.stage() + ": " + e.detail();
  }
  std::printf("[%s] AC%d %s: %s\n", ok ? "PASS" : "FAIL", number, title.c_str(), detail.c_str());
  std::fflush(stdout);
  return ok ? 0 : 1;
}

}  // namespace

int main() {
  const ProblemSpec p = problem_from_json(read_json_file(G2FLOW_FIXTURES "/paper.json"));
  const G2Structure g2 = G2Structure::from_phi(p.phi);
  const StructureConstants& mu = p.algebra;
  int failed = 0;

  failed += report(1, "exterior calculus", [&] {
    const KForm dphi = ce_differential(mu, g2.phi());
    const KForm dpsi = ce_differential(mu, g2.psi());
    return std::vector<Check>{
        {"|dphi + 2(e2467 + e1237)|", max_abs_diff(dphi, terms(4, {{{2, 4, 6, 7}, -2.0}, {{1, 2, 3, 7}, -2.0}})), 1e-12},
        {"|dpsi|", dpsi.max_abs(), 1e-12}};
  });

  failed += report(2, "torsion", [&] {
    const TorsionForms tf = torsion_forms(g2, mu);
    return std::vector<Check>{
        {"|tau0|", std::abs(tf.tau0), 1e-9},
        {"|tau1|", tf.tau1.max_abs(), 1e-9},
        {"|tau2|", tf.tau2.max_abs(), 1e-9},
        {"|tau3 - 2(e135 + e456)|", max_abs_diff(tf.tau3, terms(3, {{{1, 3, 5}, 2.0}, {{4, 5, 6}, 2.0}})), 1e-9},
        {"|tau27 - diag(1,0,1,-1,0,-1,0)|", mdiff(tf.tau27, diag({1, 0, 1, -1, 0, -1, 0})), 1e-9},
        {"|T - diag(-1,0,-1,1,0,1,0)|", mdiff(tf.T, diag({-1, 0, -1, 1, 0, 1, 0})), 1e-9}};
  });

  failed += report(3, "Laplacian", [&] {
    const KForm expected = terms(4, {{{1, 4, 5, 7}, 4.0}, {{3, 5, 6, 7}, 4.0}});
    const KForm lap = hodge_laplacian(g2.psi(), g2, mu);
    const KForm via_tau3 = coclosed_laplacian(torsion_forms(g2, mu), g2, mu);
    return std::vector<Check>{{"|dd*psi + d*d psi - 4(e1457 + e3567)|", max_abs_diff(lap, expected), 1e-9},
                              {"|d tau3 - 4(e1457 + e3567)|", max_abs_diff(via_tau3, expected), 1e-9},
                              {"|difference|", max_abs_diff(lap, via_tau3), 1e-9}};
  });

  failed += report(4, "soliton solve", [&] {
    const auto sol = solve_algebraic_soliton(g2, mu, derivation_space(mu));
    if (!sol) fail_residual("solve_soliton", "no algebraic soliton");
    const std::vector<LinearEquation> eqs = ansatz_system(g2, mu, DiagonalAnsatz::parse("a,b,c,c,d,a,0"));
    // 2a+b+d+lambda = 0, 2a+2c+lambda = 0, a+b+c+lambda = 0, a+c+d+lambda = -4
    const std::vector<std::pair<std::vector<double>, double>> displayed = {
        {{2, 1, 0, 1}, 0.0}, {{2, 0, 2, 0}, 0.0}, {{1, 1, 1, 0}, 0.0}, {{1, 0, 1, 1}, -4.0}};
    double missing = 0.0;
    for (const auto& [coeffs, rhs] : displayed) {
      double best = 1e300;
      for (const LinearEquation& e : eqs) {
        double d = std::abs(e.lambda_coeff - 1.0) + std::abs(e.rhs - rhs);
        for (std::size_t n = 0; n < coeffs.size(); ++n) d += std::abs(e.coeffs[n] - coeffs[n]);
        best = std::min(best, d);
      }
      missing = std::max(missing, best);
    }
    return std::vector<Check>{{"|lambda + 8|", std::abs(sol->lambda + 8.0), 1e-9},
                              {"|D - diag(2,4,2,2,0,2,0)|", mdiff(sol->D, diag({2, 4, 2, 2, 0, 2, 0})), 1e-9},
                              {"residual", sol->residual, 1e-9},
                              {"ansatz rows missing", missing, 1e-12}};
  });

  const auto soliton = solve_algebraic_soliton(g2, mu, derivation_space(mu));

  failed += report(5, "self-similar solution", [&] {
    if (!soliton) fail_residual("solve_soliton", "no algebraic soliton");
    const SelfSimilarTrajectory traj(*soliton, g2);
    double worst = 0.0;
    for (double t : {-1.0, 0.0, 0.1, 0.2}) {
      const double f = 1.0 - 4.0 * t;
      const KForm closed = terms(4, {{{1, 2, 5, 6}, 1.0},
                                     {{1, 3, 4, 6}, 1.0},
                                     {{2, 3, 4, 5}, 1.0},
                                     {{1, 2, 3, 7}, 1.0},
                                     {{1, 4, 5, 7}, f},
                                     {{3, 5, 6, 7}, f},
                                     {{2, 4, 6, 7}, -1.0}});
      worst = std::max(worst, max_abs_diff(traj.psi(t), closed));
    }
    return std::vector<Check>{{"|psi_t - closed form| over t in {-1,0,0.1,0.2}", worst, 1e-9},
                              {"co-flow residual (t=0, dt=1e-4)", verify_coflow(traj, mu, 0.0, 1e-4), 1e-6}};
  });

  failed += report(6, "curvature", [&] {
    if (!soliton) fail_residual("solve_soliton", "no algebraic soliton");
    const SelfSimilarTrajectory traj(*soliton, g2);
    std::vector<Check> checks;
    for (double t : {0.0, 0.1}) {
      const G2Structure gt = G2Structure::from_phi(traj.phi(t));
      const RicciResult r = ricci(mu, gt.metric());
      const double factor = 1.0 / std::sqrt(traj.b(t));
      // ric = -4 c^{-1/2} (f^7)^2 with f^7 the g_t-unit covector along e^7.
      Matrix7 expected = Matrix7::Zero();
      expected(6, 6) = -4.0 * factor / gt.metric_inverse()(6, 6);
      const std::string at = " (t=" + std::string(t == 0.0 ? "0" : "0.1") + ")";
      checks.push_back({"|ric + 4c^(-1/2)(f7)^2|" + at, mdiff(r.ric, expected), 1e-7});
      checks.push_back({"|R + 4c^(-1/2)|" + at, std::abs(r.scalar + 4.0 * factor), 1e-7});
      checks.push_back({"|R + |tau3|^2/2|" + at, scalar_torsion_identity(gt, mu), 1e-7});
      checks.push_back({"|F - 1|" + at, std::abs(pinching_ratio(mu, gt.metric()) - 1.0), 1e-7});
    }
    const RicciSolitonReport rs = ricci_soliton_check(mu, g2.metric());
    checks.push_back({"|lambda_Ric + 4|", std::abs(rs.lambda + 4.0), 1e-9});
    checks.push_back({"Ricci soliton residual", rs.residual, 1e-9});
    checks.push_back({"derivation residual", derivation_residual(mu, rs.D), 1e-9});
    return checks;
  });

  failed += report(7, "bracket flow", [&] {
    const BracketFlow flow(g2);
    auto scale = [](double t) { return 1.0 / std::sqrt(1.0 - 4.0 * t); };
    const FlowResult a = flow.integrate(mu, 0.2, 1e-3);
    const FlowResult b = flow.integrate(mu, 0.2, 5e-4);
    const double dev = compare_scalar_family(a.states, scale);
    const double dev_half = compare_scalar_family(b.states, scale);
    const double ratio = dev / dev_half;
    const FlowResult back = flow.integrate(mu, -10.0, 1e-3);
    int increases = back.completed ? 0 : 1;
    for (std::size_t n = 1; n < back.states.size(); ++n) {
      const FlowDiagnostics& prev = back.states[n - 1].diagnostics;
      const FlowDiagnostics& cur = back.states[n].diagnostics;
      if (!(cur.bracket_norm < prev.bracket_norm) || !(cur.torsion_norm < prev.torsion_norm)) ++increases;
    }
    return std::vector<Check>{{"deviation (dt=1e-3)", dev, 1e-5},
                              {"|log2(ratio) - 4|", std::abs(std::log2(ratio) - 4.0), 1.0},
                              {"non-decreasing steps to t=-10", static_cast<double>(increases), 0.5}};
  });

  failed += report(8, "property suites", [&] {
    std::vector<Check> checks;
    for (const testing::PropertyOutcome& o : testing::run_all_properties())
      checks.push_back({o.name + " failures/" + std::to_string(o.cases), static_cast<double>(o.cases > 0 ? o.failures : 1), 0.5});
    return checks;
  });

  return failed == 0 ? 0 : 1;
}
