#include "g2flow/io.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "g2flow/error.hpp"

namespace g2flow {

namespace {

double finite_number(const Json& j, const std::string& stage, const std::string& what) {
  if (!j.is_number()) fail_parse(stage, what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail_parse(stage, what + " must be finite");
  return v;
}

int label(const Json& j, const std::string& stage) {
  if (!j.is_number_integer()) fail_parse(stage, "index must be an integer");
  const auto v = j.get<long long>();
  if (v < 1 || v > kDim) fail_parse(stage, "index out of range 1..7");
  return static_cast<int>(v);
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& stage) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail_parse(stage, "unknown key '" + it.key() + "'");
  }
}

}  // namespace

Json kform_to_json(const KForm& a) {
  Json rows = Json::array();
  for (const auto& [idx, v] : a.terms()) {
    Json row = Json::array();
    for (int l : idx.labels()) row.push_back(l);
    row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

KForm kform_from_json(const Json& j, int grade) {
  const std::string stage = "parse_kform";
  if (!j.is_array()) fail_parse(stage, "a form is an array of [i1, ..., ik, value] rows");
  if (j.empty()) {
    if (grade < 0) fail_parse(stage, "cannot infer the grade of an empty form");
    return KForm(grade);
  }
  std::set<std::uint8_t> seen;
  KForm out(grade < 0 ? static_cast<int>(j.front().is_array() ? j.front().size() : 1) - 1 : grade);
  for (const Json& row : j) {
    if (!row.is_array() || row.empty()) fail_parse(stage, "each row must be [i1, ..., ik, value]");
    if (static_cast<int>(row.size()) - 1 != out.grade()) fail_parse(stage, "rows have inconsistent grade");
    std::vector<int> labels;
    for (std::size_t n = 0; n + 1 < row.size(); ++n) {
      labels.push_back(label(row[n], stage));
      if (n > 0 && labels[n] <= labels[n - 1]) fail_parse(stage, "indices must be strictly increasing");
    }
    const MultiIndex idx = MultiIndex::from_labels(labels);
    if (!seen.insert(idx.mask()).second) fail_parse(stage, "repeated monomial " + idx.to_string());
    out.add_term(idx, finite_number(row.back(), stage, "coefficient"));
  }
  return out;
}

Json bracket_to_json(const StructureConstants& mu) {
  Json rows = Json::array();
  for (int i = 1; i <= kDim; ++i)
    for (int j = i + 1; j <= kDim; ++j)
      for (int k = 1; k <= kDim; ++k) {
        const double v = mu.get(i, j, k);
        if (v != 0.0) rows.push_back(Json::array({i, j, k, v}));
      }
  return Json{{"dim", kDim}, {"brackets", rows}};
}

StructureConstants bracket_from_json(const Json& j) {
  const std::string stage = "parse_algebra";
  if (!j.is_object()) fail_parse(stage, "algebra must be an object");
  if (j.contains("almost_abelian")) {
    reject_unknown(j, {"almost_abelian"}, stage);
    const Json& m = j["almost_abelian"];
    if (!m.is_array() || m.size() != 6) fail_parse(stage, "almost_abelian must be a 6x6 matrix");
    Eigen::Matrix<double, 6, 6> a;
    for (int r = 0; r < 6; ++r) {
      if (!m[r].is_array() || m[r].size() != 6) fail_parse(stage, "almost_abelian must be a 6x6 matrix");
      for (int c = 0; c < 6; ++c) a(r, c) = finite_number(m[r][c], stage, "matrix entry");
    }
    return almost_abelian(a);
  }
  reject_unknown(j, {"dim", "brackets"}, stage);
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() != kDim)
    fail_parse(stage, "dim must be 7");
  if (!j.contains("brackets") || !j["brackets"].is_array()) fail_parse(stage, "brackets must be an array");
  StructureConstants mu;
  std::set<int> seen;
  for (const Json& row : j["brackets"]) {
    if (!row.is_array() || row.size() != 4) fail_parse(stage, "each bracket row must be [i, j, k, value]");
    const int a = label(row[0], stage), b = label(row[1], stage), k = label(row[2], stage);
    if (a >= b) fail_parse(stage, "bracket rows need i < j");
    if (!seen.insert(7 * pair_index(a - 1, b - 1) + (k - 1)).second) fail_parse(stage, "repeated bracket entry");
    mu.set(a, b, k, finite_number(row[3], stage, "structure constant"));
  }
  return mu;
}

Json matrix_to_json(const Matrix7& m) {
  Json rows = Json::array();
  for (int r = 0; r < kDim; ++r) {
    Json row = Json::array();
    for (int c = 0; c < kDim; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix7 matrix_from_json(const Json& j) {
  const std::string stage = "parse_matrix";
  if (!j.is_array() || j.size() != kDim) fail_parse(stage, "expected a 7x7 matrix");
  Matrix7 m;
  for (int r = 0; r < kDim; ++r) {
    if (!j[r].is_array() || j[r].size() != kDim) fail_parse(stage, "expected a 7x7 matrix");
    for (int c = 0; c < kDim; ++c) m(r, c) = finite_number(j[r][c], stage, "matrix entry");
  }
  return m;
}

ProblemSpec problem_from_json(const Json& input) {
  const std::string stage = "parse_problem";
  if (!input.is_object()) fail_parse(stage, "problem must be an object");
  const Json& j = input.contains("problem") ? input["problem"] : input;
  if (!j.is_object()) fail_parse(stage, "problem must be an object");
  reject_unknown(j, {"name", "algebra", "phi", "options"}, stage);
  if (!j.contains("algebra")) fail_parse(stage, "missing 'algebra'");
  if (!j.contains("phi")) fail_parse(stage, "missing 'phi'");

  ProblemSpec p;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail_parse(stage, "name must be a string");
    p.name = j["name"].get<std::string>();
  }
  p.algebra = bracket_from_json(j["algebra"]);
  p.phi = kform_from_json(j["phi"], 3);
  if (j.contains("options")) {
    const Json& o = j["options"];
    if (!o.is_object()) fail_parse(stage, "options must be an object");
    reject_unknown(o, {"tol", "flow_tol", "derivation_ansatz", "flow"}, stage);
    if (o.contains("tol")) p.options.tol = finite_number(o["tol"], stage, "tol");
    if (o.contains("flow_tol")) p.options.flow_tol = finite_number(o["flow_tol"], stage, "flow_tol");
    if (o.contains("derivation_ansatz") && !o["derivation_ansatz"].is_null()) {
      if (!o["derivation_ansatz"].is_string()) fail_parse(stage, "derivation_ansatz must be a string");
      p.options.derivation_ansatz = o["derivation_ansatz"].get<std::string>();
    }
    if (o.contains("flow")) {
      const Json& f = o["flow"];
      if (!f.is_object()) fail_parse(stage, "flow must be an object");
      reject_unknown(f, {"t_end", "dt"}, stage);
      if (f.contains("t_end")) p.options.t_end = finite_number(f["t_end"], stage, "t_end");
      if (f.contains("dt")) p.options.dt = finite_number(f["dt"], stage, "dt");
    }
  }
  if (!(p.options.tol > 0.0) || !(p.options.flow_tol > 0.0)) fail_parse(stage, "tolerances must be positive");
  if (!(p.options.dt > 0.0)) fail_parse(stage, "dt must be positive");
  return p;
}

Json problem_to_json(const ProblemSpec& p) {
  Json options{{"tol", p.options.tol},
               {"flow_tol", p.options.flow_tol},
               {"flow", {{"t_end", p.options.t_end}, {"dt", p.options.dt}}}};
  if (p.options.derivation_ansatz) options["derivation_ansatz"] = *p.options.derivation_ansatz;
  Json out{{"algebra", bracket_to_json(p.algebra)}, {"phi", kform_to_json(p.phi)}, {"options", options}};
  if (!p.name.empty()) out["name"] = p.name;
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_parse("read_input", "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail_parse("read_input", path + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace g2flow
