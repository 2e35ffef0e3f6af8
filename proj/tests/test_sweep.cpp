#include "doctest.h"

#include "g2flow/sweep.hpp"
#include "oracles.hpp"

using namespace g2flow;
namespace t = g2flow::testing;

namespace {

std::vector<SweepJob> jobs() {
  std::vector<SweepJob> out;
  t::Rng rng(701);
  const StructureConstants base = t::example_bracket();
  for (int n = 0; n < 6; ++n) {
    SweepJob job;
    job.phi = t::example_phi();
    job.mu = base;
    job.mu.set(7, 2, 5, 0.2 * n);
    job.t_end = 0.05;
    job.dt = 1e-3;
    out.push_back(job);
  }
  SweepJob bad;
  bad.phi = KForm::from_terms(3, {{{1, 2, 3}, 1.0}});
  bad.mu = base;
  out.push_back(bad);
  SweepJob moved;
  const Matrix7 h = rng.near_identity(0.2);
  moved.phi = gl_action(h, t::example_phi());
  moved.mu = bracket_action(h, base);
  moved.t_end = -0.05;
  out.push_back(moved);
  return out;
}

}  // namespace

TEST_CASE("parallel sweep reproduces the serial reference bit for bit") {
  const std::vector<SweepJob> js = jobs();
  const std::vector<SweepOutcome> serial = integrate_sweep_serial(js);
  for (int threads : {0, 1, 3}) {
    const std::vector<SweepOutcome> parallel = integrate_sweep_parallel(js, threads);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t n = 0; n < serial.size(); ++n) {
      CHECK(parallel[n].error == serial[n].error);
      CHECK(parallel[n].stage == serial[n].stage);
      REQUIRE(parallel[n].result.states.size() == serial[n].result.states.size());
      for (std::size_t s = 0; s < serial[n].result.states.size(); ++s) {
        const FlowState& a = serial[n].result.states[s];
        const FlowState& b = parallel[n].result.states[s];
        CHECK(a.t == b.t);
        CHECK(max_abs_diff(a.mu, b.mu) == 0.0);
        CHECK(a.diagnostics.torsion_norm == b.diagnostics.torsion_norm);
      }
    }
  }
}

TEST_CASE("failing jobs are reported, not thrown") {
  const std::vector<SweepOutcome> out = integrate_sweep_serial(jobs());
  CHECK(out[6].error.size() > 0);
  CHECK(out[6].stage == "metric_from_phi");
  CHECK(out[6].kind == ErrorKind::Precondition);
  CHECK(out[6].result.states.empty());
  CHECK(out[0].error.empty());
  CHECK(out[0].result.completed);
  CHECK(out[0].result.states.size() == 51);
}

TEST_CASE("empty sweep") {
  CHECK(integrate_sweep_parallel({}).empty());
  CHECK(integrate_sweep_serial({}).empty());
}
