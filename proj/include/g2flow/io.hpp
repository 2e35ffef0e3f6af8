#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "g2flow/exterior_algebra.hpp"
#include "g2flow/lie_algebra.hpp"
#include "g2flow/types.hpp"

namespace g2flow {

using Json = nlohmann::json;

/// [[i1, ..., ik, value], ...] with ascending 1-based indices. `grade` is
/// required for an empty array and checked otherwise (-1 infers it).
Json kform_to_json(const KForm& a);
KForm kform_from_json(const Json& j, int grade = -1);

/// {"dim": 7, "brackets": [[i, j, k, value], ...]} with i < j, or
/// {"almost_abelian": 6x6 matrix} for [e_7, v] = A v.
Json bracket_to_json(const StructureConstants& mu);
StructureConstants bracket_from_json(const Json& j);

Json matrix_to_json(const Matrix7& m);
Matrix7 matrix_from_json(const Json& j);

struct ProblemOptions {
  double tol = tol::kCompare;
  double flow_tol = tol::kFatal;
  std::optional<std::string> derivation_ansatz;
  double t_end = 0.2;
  double dt = 1e-3;
};

struct ProblemSpec {
  std::string name;
  StructureConstants algebra;
  KForm phi{3};
  ProblemOptions options;
};

/// Accepts a problem object or a report carrying one under "problem".
/// Unknown keys raise a Parse error.
ProblemSpec problem_from_json(const Json& j);
Json problem_to_json(const ProblemSpec& p);

/// Parse errors name the file.
Json read_json_file(const std::string& path);

}  // namespace g2flow
