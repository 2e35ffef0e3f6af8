#include "doctest.h"

#include "g2flow/error.hpp"
#include "g2flow/io.hpp"
#include "oracles.hpp"

using namespace g2flow;
namespace t = g2flow::testing;

namespace {

void check_parse_error(const Json& j) {
  try {
    problem_from_json(j);
    FAIL("expected a parse error for " << j.dump());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
  }
}

Json minimal() {
  return Json{{"algebra", bracket_to_json(t::example_bracket())}, {"phi", kform_to_json(t::example_phi())}};
}

}  // namespace

TEST_CASE("forms round-trip") {
  t::Rng rng(801);
  for (int k = 0; k <= 7; ++k) {
    const KForm a = rng.form(k);
    CHECK(max_abs_diff(kform_from_json(kform_to_json(a), k), a) == 0.0);
  }
  CHECK(kform_from_json(Json::array(), 4).grade() == 4);
  CHECK_THROWS_AS(kform_from_json(Json::array()), Error);
  CHECK_THROWS_AS(kform_from_json(Json::parse("[[1,2,3,1],[1,2,3,1]]")), Error);
  CHECK_THROWS_AS(kform_from_json(Json::parse("[[1,2,1],[1,2,3,1]]")), Error);
  CHECK_THROWS_AS(kform_from_json(Json::parse("[[1,2,9,1]]")), Error);
  CHECK_THROWS_AS(kform_from_json(Json::parse("[[1,2,3,1]]"), 4), Error);
  try {
    kform_from_json(Json::parse("[[2,1,3,1]]"));
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(e.stage() == "parse_kform");
  }
}

TEST_CASE("brackets round-trip") {
  t::Rng rng(802);
  const StructureConstants mu = rng.generic_bracket();
  CHECK(max_abs_diff(bracket_from_json(bracket_to_json(mu)), mu) == 0.0);
  const Json aa = {{"almost_abelian", Json::array()}};
  Json m = Json::array();
  for (int r = 0; r < 6; ++r) {
    Json row = Json::array();
    for (int c = 0; c < 6; ++c) row.push_back(t::example_matrix()(r, c));
    m.push_back(row);
  }
  CHECK(max_abs_diff(bracket_from_json(Json{{"almost_abelian", m}}), t::example_bracket()) == 0.0);
  CHECK_THROWS_AS(bracket_from_json(aa), Error);
  CHECK_THROWS_AS(bracket_from_json(Json::parse(R"({"dim": 6, "brackets": []})")), Error);
  CHECK_THROWS_AS(bracket_from_json(Json::parse(R"({"dim": 7, "brackets": [[2, 1, 3, 1]]})")), Error);
  CHECK_THROWS_AS(bracket_from_json(Json::parse(R"({"dim": 7, "brackets": [[1, 2, 3, 1], [1, 2, 3, 2]]})")), Error);
  CHECK_THROWS_AS(bracket_from_json(Json::parse(R"({"dim": 7, "brackets": [[1, 2, 3, "x"]]})")), Error);
}

TEST_CASE("matrices round-trip") {
  t::Rng rng(803);
  const Matrix7 a = rng.matrix();
  CHECK(matrix_from_json(matrix_to_json(a)) == a);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1,2],[3,4]]")), Error);
}

TEST_CASE("problem specs") {
  const ProblemSpec p = problem_from_json(read_json_file(G2FLOW_FIXTURES "/paper.json"));
  CHECK(max_abs_diff(p.algebra, t::example_bracket()) == 0.0);
  CHECK(max_abs_diff(p.phi, t::example_phi()) == 0.0);
  CHECK_FALSE(p.options.derivation_ansatz.has_value());
  CHECK(p.options.t_end == 0.2);
  CHECK(p.options.dt == 1e-3);
  CHECK(p.options.tol == 1e-9);
  CHECK(p.options.flow_tol == 1e-6);

  const ProblemSpec back = problem_from_json(problem_to_json(p));
  CHECK(problem_to_json(back).dump() == problem_to_json(p).dump());
  // A report carrying the problem is accepted.
  CHECK(problem_from_json(Json{{"problem", problem_to_json(p)}, {"status", "ok"}}).name == p.name);

  Json with_options = minimal();
  with_options["options"] = {{"derivation_ansatz", "a,b,c,c,d,a,0"}, {"tol", 1e-8}, {"flow", {{"dt", 0.01}}}};
  const ProblemSpec q = problem_from_json(with_options);
  CHECK(*q.options.derivation_ansatz == "a,b,c,c,d,a,0");
  CHECK(q.options.tol == 1e-8);
  CHECK(q.options.dt == 0.01);
  CHECK(q.options.t_end == 0.2);
}

TEST_CASE("malformed problem specs") {
  Json j = minimal();
  j["extra"] = 1;
  check_parse_error(j);
  j = minimal();
  j["options"] = {{"colour", "red"}};
  check_parse_error(j);
  j = minimal();
  j["options"] = {{"flow", {{"dt", -1.0}}}};
  check_parse_error(j);
  j = minimal();
  j.erase("phi");
  check_parse_error(j);
  check_parse_error(Json::array());
  CHECK_THROWS_AS(read_json_file(G2FLOW_FIXTURES "/does-not-exist.json"), Error);
}
