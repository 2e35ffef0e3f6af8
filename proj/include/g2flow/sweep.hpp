#pragma once

#include <string>
#include <vector>

#include "g2flow/bracket_flow.hpp"
#include "g2flow/error.hpp"

namespace g2flow {

/// One independent bracket-flow trajectory.
struct SweepJob {
  KForm phi{3};
  StructureConstants mu;
  double t_end = 0.2;
  double dt = 1e-3;
};

struct SweepOutcome {
  FlowResult result;
  /// Non-empty when the job failed before integrating (e.g. phi not positive).
  std::string error;
  std::string stage;
  ErrorKind kind = ErrorKind::Precondition;
};

/// Reference implementation: jobs run one after another.
std::vector<SweepOutcome> integrate_sweep_serial(const std::vector<SweepJob>& jobs);

/// Same results as the serial version; jobs are distributed over OpenMP
/// threads. `threads` <= 0 keeps the OpenMP default.
std::vector<SweepOutcome> integrate_sweep_parallel(const std::vector<SweepJob>& jobs, int threads = 0);

}  // namespace g2flow
