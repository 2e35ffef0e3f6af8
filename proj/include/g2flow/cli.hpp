#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "g2flow/bracket_flow.hpp"
#include "g2flow/error.hpp"
#include "g2flow/io.hpp"

namespace g2flow {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitPrecondition = 3,
  kExitResidual = 4,
};

int exit_code(ErrorKind kind);

/// Full pipeline: metric, differentials, torsion, Laplacian, curvature,
/// soliton, self-similar check and bracket-flow cross-check. Stage errors
/// propagate as g2flow::Error; tolerance misses are listed under "failures".
Json verify_report(const ProblemSpec& p);

/// Single stages with the same report layout.
Json torsion_report(const ProblemSpec& p);
Json curvature_report(const ProblemSpec& p);
Json soliton_report(const ProblemSpec& p);

/// Runs the bracket flow of a problem with its options.
FlowResult run_flow(const ProblemSpec& p);
Json flow_summary(const ProblemSpec& p, const FlowResult& r);

/// Header "t,c_12_1,...,c_67_7,jacobi_residual,bracket_norm,torsion_norm,
/// scalar_curvature", optionally preceded by a "run" column.
void write_trajectory_csv(std::ostream& out, const std::vector<FlowState>& states, int run = -1,
                          bool header = true);

/// Human-readable rendering of any of the reports above.
std::string render_text(const Json& report);

/// Entry point; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace g2flow
