#include "g2flow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "g2flow/curvature.hpp"
#include "g2flow/error.hpp"
#include "g2flow/soliton.hpp"
#include "g2flow/sweep.hpp"

namespace g2flow {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
      return kExitParse;
    case ErrorKind::Precondition:
      return kExitPrecondition;
    case ErrorKind::Residual:
      return kExitResidual;
  }
  return kExitPrecondition;
}

namespace {

constexpr double kCoflowStep = 1e-4;
constexpr double kDomainMargin = 0.8;

// ------------------------------------------------------------ report pieces

struct Failure {
  std::string stage;
  std::string message;
};

std::string fmt(double x, const char* spec = "%.10g") {
  if (std::abs(x) < tol::kZero) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

void add_failure(Json& r, const std::string& stage, const std::string& message) {
  r["failures"].push_back(Json{{"stage", stage}, {"message", message}});
}

void check_below(Json& r, const std::string& stage, const std::string& what, double value, double limit) {
  if (!(value < limit)) add_failure(r, stage, what + " " + fmt(value, "%.3g") + " exceeds " + fmt(limit, "%.3g"));
}

void require_jacobi(const ProblemSpec& p) {
  const double j = jacobi_residual(p.algebra);
  if (!(j < p.options.tol))
    fail_precondition("jacobi", "bracket violates the Jacobi identity (residual " + fmt(j, "%.3g") + ")");
}

Json torsion_json(const TorsionForms& tf) {
  return Json{{"tau0", tf.tau0},
              {"tau1", kform_to_json(tf.tau1)},
              {"tau2", kform_to_json(tf.tau2)},
              {"tau3", kform_to_json(tf.tau3)},
              {"tau27", matrix_to_json(tf.tau27)},
              {"T", matrix_to_json(tf.T)},
              {"residual", tf.residual}};
}

Json labels_json(const TorsionClass& cls) {
  Json out = Json::array();
  for (const std::string& l : cls.labels()) out.push_back(l);
  return out;
}

void add_structure(Json& r, const G2Structure& g2, const StructureConstants& mu) {
  r["metric"] = matrix_to_json(g2.metric());
  r["orientation_flipped"] = g2.orientation_flipped();
  r["psi"] = kform_to_json(g2.psi());
  r["dphi"] = kform_to_json(ce_differential(mu, g2.phi()));
  r["dpsi"] = kform_to_json(ce_differential(mu, g2.psi()));
}

Json curvature_json(const ProblemSpec& p, const G2Structure& g2, const TorsionForms& tf, const TorsionClass& cls) {
  const RicciResult ric = ricci(p.algebra, g2.metric());
  const double n2 = ricci_norm_squared(ric, g2.metric());
  Json c{{"ricci", matrix_to_json(ric.ric)}, {"scalar", ric.scalar}, {"ricci_norm_squared", n2}};
  c["pinching"] = n2 < tol::kCompare * tol::kCompare ? Json(nullptr) : Json(ric.scalar * ric.scalar / n2);
  const RicciSolitonReport rs = ricci_soliton_check(p.algebra, g2.metric());
  c["ricci_soliton"] = Json{{"lambda", rs.lambda},
                            {"D", matrix_to_json(rs.D)},
                            {"residual", rs.residual},
                            {"is_soliton", rs.residual < p.options.tol}};
  if (cls.coclosed() && cls.tau0_zero)
    c["scalar_torsion_identity"] = std::abs(ric.scalar + 0.5 * g2.norm_squared(tf.tau3));
  else
    c["scalar_torsion_identity"] = nullptr;
  return c;
}

std::string soliton_description(const std::optional<SolitonSolution>& sol, double tolerance) {
  if (!sol) return "no algebraic soliton";
  if (std::abs(sol->c) < tolerance) {
    if (sol->Q.cwiseAbs().maxCoeff() < tolerance) return "steady trivial soliton";
    return "steady algebraic soliton";
  }
  return "algebraic soliton (lambda = " + fmt(sol->lambda) + ")";
}

std::optional<SolitonSolution> solve_soliton(const ProblemSpec& p, const G2Structure& g2, Json& r) {
  const DerivationBasis der = derivation_space(p.algebra);
  r["derivation_dim"] = der.dim();
  std::optional<SolitonSolution> sol;
  if (p.options.derivation_ansatz) {
    const DiagonalAnsatz ansatz = DiagonalAnsatz::parse(*p.options.derivation_ansatz);
    sol = solve_algebraic_soliton(g2, p.algebra, ansatz, p.options.tol);
    Json eqs = Json::array();
    for (const LinearEquation& e : ansatz_system(g2, p.algebra, ansatz)) {
      Json coeffs = Json::object();
      for (std::size_t n = 0; n < e.coeffs.size(); ++n) coeffs[ansatz.variables()[n]] = e.coeffs[n];
      eqs.push_back(Json{{"coeffs", coeffs}, {"lambda", e.lambda_coeff}, {"rhs", e.rhs}});
    }
    r["ansatz"] = Json{{"pattern", ansatz.pattern()}, {"equations", eqs}};
  } else {
    sol = solve_algebraic_soliton(g2, p.algebra, der, p.options.tol);
  }
  if (sol) {
    r["lambda"] = sol->lambda;
    r["c"] = sol->c;
    r["D"] = matrix_to_json(sol->D);
    r["Q"] = matrix_to_json(sol->Q);
    r["residual"] = sol->residual;
    r["derivation_residual"] = sol->derivation_residual;
    r["rank"] = sol->rank;
    r["unknowns"] = sol->unknowns;
  } else {
    for (const char* k : {"lambda", "c", "D", "Q", "residual"}) r[k] = nullptr;
  }
  r["soliton"] = soliton_description(sol, p.options.tol);
  return sol;
}

// Keeps t (and t +- the co-flow step) inside the domain 2ct + 1 > 0.
double clamp_to_domain(double c, double t) {
  if (c == 0.0) return t;
  const double edge = -1.0 / (2.0 * c);
  if (c < 0.0 && t > kDomainMargin * edge) return kDomainMargin * edge;
  if (c > 0.0 && t < kDomainMargin * edge) return kDomainMargin * edge;
  return t;
}

Json state_json(const FlowState& s) {
  return Json{{"t", s.t},
              {"algebra", bracket_to_json(s.mu)},
              {"jacobi_residual", s.diagnostics.jacobi_residual},
              {"bracket_norm", s.diagnostics.bracket_norm},
              {"torsion_norm", s.diagnostics.torsion_norm},
              {"scalar_curvature", s.diagnostics.scalar_curvature}};
}

// Comparison of a trajectory with the scalar family k(t) mu_0, k = (2ct+1)^{-1/2}.
// The invariant deviation compares R and |T| with their scaled initial values;
// it does not see a drift inside the G2 orbit.
Json closed_form_json(const FlowResult& r, std::optional<double> c) {
  if (r.states.empty()) return nullptr;
  const StructureConstants& mu0 = r.states.front().mu;
  Json out{{"distance_to_scalar_family", distance_to_scalar_family(r.states.back().mu, mu0)}};
  if (!c) {
    out["soliton"] = false;
    return out;
  }
  const double cc = *c;
  auto k = [cc](double t) { return 1.0 / std::sqrt(2.0 * cc * t + 1.0); };
  const FlowDiagnostics& d0 = r.states.front().diagnostics;
  double inv = 0.0;
  for (const FlowState& s : r.states) {
    const double kt = k(s.t);
    inv = std::max(inv, std::abs(s.diagnostics.scalar_curvature - kt * kt * d0.scalar_curvature));
    inv = std::max(inv, std::abs(s.diagnostics.torsion_norm - kt * d0.torsion_norm));
  }
  out["soliton"] = true;
  out["c"] = cc;
  out["scalar_family_deviation"] = compare_scalar_family(r.states, k);
  out["invariant_deviation"] = inv;
  return out;
}

Json flow_block(const ProblemSpec& p, const FlowResult& r, std::optional<double> c, double t_end) {
  Json f{{"t_end", t_end},
         {"dt", p.options.dt},
         {"steps", r.states.empty() ? 0 : static_cast<long>(r.states.size()) - 1},
         {"completed", r.completed},
         {"stop_reason", r.stop_reason}};
  if (!r.states.empty()) {
    f["start"] = state_json(r.states.front());
    f["end"] = state_json(r.states.back());
  }
  f["closed_form"] = closed_form_json(r, c);
  return f;
}

std::string summary(const TorsionClass& cls, const std::string& soliton) {
  std::string s;
  for (const std::string& l : cls.labels()) s += (s.empty() ? "" : "; ") + l;
  if (s.empty()) s = "general torsion";
  return s + "; " + soliton;
}

void finish_status(Json& r) {
  if (!r.contains("failures")) r["failures"] = Json::array();
  r["status"] = r["failures"].empty() ? "ok" : "failed";
}

// ---------------------------------------------------------------- rendering

std::string form_text(const Json& j, int grade) {
  const KForm f = kform_from_json(j, grade);
  return f.is_zero() ? "0" : f.to_string(10);
}

std::string matrix_text(const Json& j) {
  const Matrix7 m = matrix_from_json(j);
  std::ostringstream s;
  const Matrix7 off = m - Matrix7(m.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() < tol::kZero) {
    s << "diag(";
    for (int i = 0; i < kDim; ++i) s << (i ? ", " : "") << fmt(m(i, i));
    s << ")";
    return s.str();
  }
  s << "[";
  for (int i = 0; i < kDim; ++i) {
    s << (i ? "; " : "");
    for (int k = 0; k < kDim; ++k) s << (k ? " " : "") << fmt(m(i, k));
  }
  s << "]";
  return s.str();
}

std::string number_or(const Json& j, const std::string& fallback) {
  return j.is_number() ? fmt(j.get<double>()) : fallback;
}

std::string equation_text(const Json& e) {
  std::string s;
  auto term = [&s](double c, const std::string& name) {
    if (std::abs(c) < tol::kZero) return;
    const double a = std::abs(c);
    s += s.empty() ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
    if (std::abs(a - 1.0) > tol::kZero) s += fmt(a);
    s += name;
  };
  for (auto it = e["coeffs"].begin(); it != e["coeffs"].end(); ++it) term(it.value().get<double>(), it.key());
  term(e["lambda"].get<double>(), "lambda");
  if (s.empty()) s = "0";
  return s + " = " + fmt(e["rhs"].get<double>());
}

void render_flow(std::ostringstream& o, const Json& f) {
  o << "bracket flow: t from 0 to " << fmt(f["t_end"].get<double>()) << ", dt = " << fmt(f["dt"].get<double>())
    << ", " << f["steps"].get<long>() << " steps, " << (f["completed"].get<bool>() ? "completed" : "stopped");
  if (!f["completed"].get<bool>()) o << " (" << f["stop_reason"].get<std::string>() << ")";
  o << "\n";
  if (f.contains("end")) {
    const Json& e = f["end"];
    o << "  final bracket norm = " << fmt(e["bracket_norm"].get<double>())
      << ", torsion norm = " << fmt(e["torsion_norm"].get<double>())
      << ", R = " << fmt(e["scalar_curvature"].get<double>()) << "\n";
  }
  const Json& cf = f["closed_form"];
  if (cf.is_object()) {
    if (cf["soliton"].get<bool>()) {
      o << "  deviation from (2ct+1)^(-1/2) mu_0 = " << fmt(cf["scalar_family_deviation"].get<double>(), "%.3g")
        << ", invariant deviation = " << fmt(cf["invariant_deviation"].get<double>(), "%.3g") << "\n";
    } else {
      o << "  distance of final bracket to the scalar family = "
        << fmt(cf["distance_to_scalar_family"].get<double>(), "%.3g") << "\n";
    }
  }
}

}  // namespace

// ------------------------------------------------------------------ reports

Json torsion_report(const ProblemSpec& p) {
  Json r{{"problem", problem_to_json(p)}};
  const G2Structure g2 = G2Structure::from_phi(p.phi);
  require_jacobi(p);
  add_structure(r, g2, p.algebra);
  const TorsionForms tf = torsion_forms(g2, p.algebra);
  const TorsionClass cls = torsion_class(tf, p.options.tol);
  r["torsion"] = torsion_json(tf);
  r["torsion_class"] = labels_json(cls);
  finish_status(r);
  return r;
}

Json curvature_report(const ProblemSpec& p) {
  Json r{{"problem", problem_to_json(p)}};
  const G2Structure g2 = G2Structure::from_phi(p.phi);
  require_jacobi(p);
  r["metric"] = matrix_to_json(g2.metric());
  const TorsionForms tf = torsion_forms(g2, p.algebra);
  const TorsionClass cls = torsion_class(tf, p.options.tol);
  r["torsion_class"] = labels_json(cls);
  r["curvature"] = curvature_json(p, g2, tf, cls);
  finish_status(r);
  return r;
}

Json soliton_report(const ProblemSpec& p) {
  Json r{{"problem", problem_to_json(p)}};
  const G2Structure g2 = G2Structure::from_phi(p.phi);
  require_jacobi(p);
  const TorsionForms tf = torsion_forms(g2, p.algebra);
  const TorsionClass cls = torsion_class(tf, p.options.tol);
  r["torsion_class"] = labels_json(cls);
  r["laplacian"] = Json{{"psi", kform_to_json(hodge_laplacian(g2.psi(), g2, p.algebra))}};
  const auto sol = solve_soliton(p, g2, r);
  const Json curv = curvature_json(p, g2, tf, cls);
  r["curvature"] = Json{{"ricci", curv["ricci"]}, {"scalar", curv["scalar"]}, {"pinching", curv["pinching"]}};
  r["summary"] = summary(cls, soliton_description(sol, p.options.tol));
  finish_status(r);
  return r;
}

Json verify_report(const ProblemSpec& p) {
  Json r{{"problem", problem_to_json(p)}, {"failures", Json::array()}};
  const double tol = p.options.tol;
  const G2Structure g2 = G2Structure::from_phi(p.phi);
  require_jacobi(p);
  add_structure(r, g2, p.algebra);

  const TorsionForms tf = torsion_forms(g2, p.algebra);
  const TorsionClass cls = torsion_class(tf, tol);
  r["torsion"] = torsion_json(tf);
  r["torsion_class"] = labels_json(cls);
  check_below(r, "torsion_forms", "decomposition residual", tf.residual, tol);

  const KForm lap = hodge_laplacian(g2.psi(), g2, p.algebra);
  Json l{{"psi", kform_to_json(lap)}, {"coclosed_formula", nullptr}, {"agreement", nullptr}};
  if (cls.coclosed()) {
    const double agree = max_abs_diff(lap, coclosed_laplacian(tf, g2, p.algebra));
    l["agreement"] = agree;
    check_below(r, "laplacian", "composition vs coclosed formula", agree, tol);
  }
  r["laplacian"] = l;

  const Json curv = curvature_json(p, g2, tf, cls);
  if (curv["scalar_torsion_identity"].is_number())
    check_below(r, "curvature", "scalar-torsion identity residual", curv["scalar_torsion_identity"].get<double>(), tol);
  r["curvature"] = curv;

  const auto sol = solve_soliton(p, g2, r);
  std::optional<double> c;
  double t_flow = p.options.t_end;
  if (sol) {
    c = sol->c;
    const SelfSimilarTrajectory traj(*sol, g2);
    t_flow = clamp_to_domain(sol->c, p.options.t_end);
    Json ss{{"t", t_flow}};
    if (sol->c < 0.0) ss["domain"] = Json{{"upper", -1.0 / (2.0 * sol->c)}};
    if (sol->c > 0.0) ss["domain"] = Json{{"lower", -1.0 / (2.0 * sol->c)}};
    const double r0 = verify_coflow(traj, p.algebra, 0.0, kCoflowStep);
    const double r1 = verify_coflow(traj, p.algebra, t_flow, kCoflowStep);
    ss["coflow_residual_t0"] = r0;
    ss["coflow_residual_t"] = r1;
    check_below(r, "self_similar", "co-flow residual at t = 0", r0, p.options.flow_tol);
    check_below(r, "self_similar", "co-flow residual at t = " + fmt(t_flow), r1, p.options.flow_tol);
    r["self_similar"] = ss;
  }

  const BracketFlow flow(g2, FlowGuards{p.options.flow_tol, 1e6});
  const FlowResult fr = flow.integrate(p.algebra, t_flow, p.options.dt);
  r["flow"] = flow_block(p, fr, c, t_flow);
  if (!fr.completed) add_failure(r, "bracket_flow", fr.stop_reason);
  if (c) check_below(r, "bracket_flow", "invariant deviation", r["flow"]["closed_form"]["invariant_deviation"], p.options.flow_tol);

  r["summary"] = summary(cls, soliton_description(sol, tol));
  finish_status(r);
  return r;
}

FlowResult run_flow(const ProblemSpec& p) {
  const G2Structure g2 = G2Structure::from_phi(p.phi);
  require_jacobi(p);
  const BracketFlow flow(g2, FlowGuards{p.options.flow_tol, 1e6});
  return flow.integrate(p.algebra, p.options.t_end, p.options.dt);
}

Json flow_summary(const ProblemSpec& p, const FlowResult& r) {
  const G2Structure g2 = G2Structure::from_phi(p.phi);
  std::optional<double> c;
  if (const auto sol = solve_algebraic_soliton(g2, p.algebra, derivation_space(p.algebra), p.options.tol)) c = sol->c;
  Json out{{"problem", problem_to_json(p)}, {"flow", flow_block(p, r, c, p.options.t_end)}};
  out["failures"] = Json::array();
  if (!r.completed) add_failure(out, "bracket_flow", r.stop_reason);
  finish_status(out);
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<FlowState>& states, int run, bool header) {
  if (header) {
    if (run >= 0) out << "run,";
    out << "t";
    for (int i = 1; i <= kDim; ++i)
      for (int j = i + 1; j <= kDim; ++j)
        for (int k = 1; k <= kDim; ++k) out << ",c_" << i << j << "_" << k;
    out << ",jacobi_residual,bracket_norm,torsion_norm,scalar_curvature\n";
  }
  char buf[40];
  auto num = [&buf](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  };
  for (const FlowState& s : states) {
    if (run >= 0) out << run << ",";
    out << num(s.t);
    const BracketCoordinates x = s.mu.coordinates();
    for (int n = 0; n < kBracketCoords; ++n) out << "," << num(x[n]);
    out << "," << num(s.diagnostics.jacobi_residual) << "," << num(s.diagnostics.bracket_norm) << ","
        << num(s.diagnostics.torsion_norm) << "," << num(s.diagnostics.scalar_curvature) << "\n";
  }
}

std::string render_text(const Json& r) {
  std::ostringstream o;
  if (r.contains("problem") && r["problem"].contains("name")) o << "problem: " << r["problem"]["name"].get<std::string>() << "\n";
  if (r.contains("metric")) o << "metric: g = " << matrix_text(r["metric"]) << "\n";
  if (r.value("orientation_flipped", false)) o << "orientation: reversed (B negative definite)\n";
  if (r.contains("psi")) o << "psi = " << form_text(r["psi"], 4) << "\n";
  if (r.contains("dphi")) o << "d phi = " << form_text(r["dphi"], 4) << "\n";
  if (r.contains("dpsi")) o << "d psi = " << form_text(r["dpsi"], 5) << "\n";
  if (r.contains("torsion")) {
    const Json& t = r["torsion"];
    o << "torsion: tau0 = " << fmt(t["tau0"].get<double>()) << "\n"
      << "  tau1 = " << form_text(t["tau1"], 1) << "\n"
      << "  tau2 = " << form_text(t["tau2"], 2) << "\n"
      << "  tau3 = " << form_text(t["tau3"], 3) << "\n"
      << "  tau27 = " << matrix_text(t["tau27"]) << "\n"
      << "  T = " << matrix_text(t["T"]) << "\n"
      << "  decomposition residual = " << fmt(t["residual"].get<double>(), "%.3g") << "\n";
  }
  if (r.contains("torsion_class")) {
    std::string s;
    for (const Json& l : r["torsion_class"]) s += (s.empty() ? "" : ", ") + l.get<std::string>();
    o << "torsion class: " << (s.empty() ? "general" : s) << "\n";
  }
  if (r.contains("laplacian")) {
    const Json& l = r["laplacian"];
    o << "Delta psi = " << form_text(l["psi"], 4) << "\n";
    if (l.contains("agreement") && l["agreement"].is_number())
      o << "  coclosed formula agrees to " << fmt(l["agreement"].get<double>(), "%.3g") << "\n";
  }
  if (r.contains("curvature")) {
    const Json& c = r["curvature"];
    o << "ric = " << matrix_text(c["ricci"]) << "\n"
      << "R = " << fmt(c["scalar"].get<double>()) << "\n"
      << "F = R^2/|ric|^2 = " << number_or(c["pinching"], "undefined (Ricci-flat)") << "\n";
    if (c.contains("ricci_soliton")) {
      const Json& rs = c["ricci_soliton"];
      o << "Ricci soliton: Ric = lambda I + D with lambda = " << fmt(rs["lambda"].get<double>())
        << ", D = " << matrix_text(rs["D"]) << ", residual = " << fmt(rs["residual"].get<double>(), "%.3g") << "\n";
    }
    if (c.contains("scalar_torsion_identity") && c["scalar_torsion_identity"].is_number())
      o << "  |R + |tau3|^2/2| = " << fmt(c["scalar_torsion_identity"].get<double>(), "%.3g") << "\n";
  }
  if (r.contains("derivation_dim")) o << "derivations: dim " << r["derivation_dim"].get<int>() << "\n";
  if (r.contains("soliton")) {
    if (r["lambda"].is_number()) {
      o << "soliton: lambda = " << fmt(r["lambda"].get<double>()) << ", c = " << fmt(r["c"].get<double>()) << "\n"
        << "  D = " << matrix_text(r["D"]) << "\n"
        << "  Q = " << matrix_text(r["Q"]) << "\n"
        << "  residual = " << fmt(r["residual"].get<double>(), "%.3g")
        << ", derivation residual = " << fmt(r["derivation_residual"].get<double>(), "%.3g") << ", rank "
        << r["rank"].get<int>() << " of " << r["unknowns"].get<int>() << " unknowns\n";
    } else {
      o << "soliton: none\n";
    }
  }
  if (r.contains("ansatz")) {
    o << "ansatz D = diag(" << r["ansatz"]["pattern"].get<std::string>() << "):\n";
    for (const Json& e : r["ansatz"]["equations"]) o << "  " << equation_text(e) << "\n";
  }
  if (r.contains("self_similar")) {
    const Json& s = r["self_similar"];
    o << "self-similar solution:";
    if (s.contains("domain") && s["domain"].contains("upper")) o << " t < " << fmt(s["domain"]["upper"].get<double>()) << ";";
    if (s.contains("domain") && s["domain"].contains("lower")) o << " t > " << fmt(s["domain"]["lower"].get<double>()) << ";";
    o << " co-flow residual " << fmt(s["coflow_residual_t0"].get<double>(), "%.3g") << " at t = 0, "
      << fmt(s["coflow_residual_t"].get<double>(), "%.3g") << " at t = " << fmt(s["t"].get<double>()) << "\n";
  }
  if (r.contains("flow")) render_flow(o, r["flow"]);
  if (r.contains("summary")) o << "summary: " << r["summary"].get<std::string>() << "\n";
  if (r.contains("status")) {
    o << "status: " << r["status"].get<std::string>() << "\n";
    for (const Json& f : r["failures"])
      o << "  " << f["stage"].get<std::string>() << ": " << f["message"].get<std::string>() << "\n";
  }
  return o.str();
}

// --------------------------------------------------------------------- CLI

namespace {

struct Flags {
  std::string input;
  std::string sweep;
  std::string output = "text";
  std::optional<double> tol, dt, t_end;
  std::optional<std::string> ansatz;
  int threads = 0;
  bool serial = false;
};

void apply_overrides(ProblemSpec& p, const Flags& f) {
  if (f.tol) p.options.tol = *f.tol;
  if (f.dt) p.options.dt = *f.dt;
  if (f.t_end) p.options.t_end = *f.t_end;
  if (f.ansatz) p.options.derivation_ansatz = *f.ansatz;
  if (!(p.options.tol > 0.0)) fail_parse("options", "--tol must be positive");
  if (!(p.options.dt > 0.0)) fail_parse("options", "--dt must be positive");
}

ProblemSpec load_problem(const Flags& f) {
  ProblemSpec p = problem_from_json(read_json_file(f.input));
  apply_overrides(p, f);
  return p;
}

int report_failures(const Json& r, std::ostream& err) {
  if (!r.contains("failures") || r["failures"].empty()) return kExitOk;
  for (const Json& f : r["failures"])
    err << "g2flow: stage " << f["stage"].get<std::string>() << " failed: " << f["message"].get<std::string>() << "\n";
  return kExitResidual;
}

int emit(const Json& r, const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.output == "json")
    out << r.dump(2) << "\n";
  else
    out << render_text(r);
  return report_failures(r, err);
}

int cmd_flow_single(const Flags& f, std::ostream& out, std::ostream& err) {
  const ProblemSpec p = load_problem(f);
  const FlowResult r = run_flow(p);
  const Json s = flow_summary(p, r);
  if (f.output == "csv")
    write_trajectory_csv(out, r.states);
  else if (f.output == "json")
    out << s.dump(2) << "\n";
  else
    out << render_text(s);
  return report_failures(s, err);
}

int cmd_flow_sweep(const Flags& f, std::ostream& out, std::ostream& err) {
  const Json j = read_json_file(f.sweep);
  if (!j.is_array()) fail_parse("parse_sweep", "sweep file must be an array of problems");
  std::vector<ProblemSpec> problems;
  std::vector<SweepJob> jobs;
  for (const Json& item : j) {
    ProblemSpec p = problem_from_json(item);
    apply_overrides(p, f);
    jobs.push_back({p.phi, p.algebra, p.options.t_end, p.options.dt});
    problems.push_back(std::move(p));
  }
  const std::vector<SweepOutcome> res = f.serial ? integrate_sweep_serial(jobs) : integrate_sweep_parallel(jobs, f.threads);

  int code = kExitOk;
  bool header = true;
  Json all = Json::array();
  for (std::size_t n = 0; n < res.size(); ++n) {
    const int run = static_cast<int>(n);
    if (!res[n].error.empty()) {
      err << "g2flow: run " << run << ": stage " << res[n].stage << " failed: " << res[n].error << "\n";
      if (code == kExitOk) code = exit_code(res[n].kind);
      all.push_back(Json{{"run", run}, {"status", "failed"}, {"error", {{"stage", res[n].stage}, {"message", res[n].error}}}});
      continue;
    }
    if (f.output == "csv") {
      write_trajectory_csv(out, res[n].result.states, run, header);
      header = false;
    }
    Json s = flow_summary(problems[n], res[n].result);
    s["run"] = run;
    if (f.output == "text") out << "run " << run << ":\n" << render_text(s);
    if (report_failures(s, err) != kExitOk && code == kExitOk) code = kExitResidual;
    all.push_back(std::move(s));
  }
  if (f.output == "json") out << all.dump(2) << "\n";
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"G2-structures, Laplacian co-flow solitons and the bracket flow on 7-dimensional Lie algebras",
               "g2flow"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&f](CLI::App* sub, bool input_required) {
    auto* in = sub->add_option("input", f.input, "Problem JSON (or a report carrying one)");
    if (input_required) in->required();
    sub->add_option("--tol", f.tol, "Algebraic tolerance (default 1e-9)");
    sub->add_option("--dt", f.dt, "Flow step (default 1e-3)");
    sub->add_option("--t-end", f.t_end, "Flow end time (default 0.2)");
    sub->add_option("--ansatz", f.ansatz, "Diagonal derivation pattern such as a,b,c,c,d,a,0");
    sub->add_option("--output", f.output, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
  };
  CLI::App* verify = app.add_subcommand("verify", "Run the full pipeline and check every residual");
  CLI::App* soliton = app.add_subcommand("soliton", "Solve for an algebraic soliton");
  CLI::App* flow = app.add_subcommand("flow", "Integrate the bracket flow");
  CLI::App* torsion = app.add_subcommand("torsion", "Torsion forms and torsion class");
  CLI::App* curvature = app.add_subcommand("curvature", "Ricci tensor, scalar curvature and pinching");
  for (CLI::App* s : {verify, soliton, torsion, curvature}) common(s, true);
  common(flow, false);
  flow->add_option("--sweep", f.sweep, "JSON array of problems integrated independently");
  flow->add_option("--threads", f.threads, "OpenMP threads for --sweep (default: OpenMP setting)");
  flow->add_flag("--serial", f.serial, "Run the sweep with the serial reference loop");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitParse;
  }

  try {
    if (flow->parsed()) {
      if (f.sweep.empty() == f.input.empty()) fail_parse("flow", "give either an input file or --sweep");
      return f.sweep.empty() ? cmd_flow_single(f, out, err) : cmd_flow_sweep(f, out, err);
    }
    if (f.output == "csv") fail_parse("options", "csv output is only available for flow");
    const ProblemSpec p = load_problem(f);
    if (verify->parsed()) return emit(verify_report(p), f, out, err);
    if (soliton->parsed()) return emit(soliton_report(p), f, out, err);
    if (torsion->parsed()) return emit(torsion_report(p), f, out, err);
    return emit(curvature_report(p), f, out, err);
  } catch (const Error& e) {
    err << "g2flow: stage " << e.stage() << " failed: " << e.detail() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "g2flow: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace g2flow
