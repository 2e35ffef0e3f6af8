#include "g2flow/sweep.hpp"

#include <omp.h>

namespace g2flow {

namespace {

SweepOutcome run_job(const SweepJob& job) {
  SweepOutcome out;
  try {
    const BracketFlow flow(G2Structure::from_phi(job.phi));
    out.result = flow.integrate(job.mu, job.t_end, job.dt);
  } catch (const Error& e) {
    out.error = e.detail();
    out.stage = e.stage();
    out.kind = e.kind();
    out.result.completed = false;
  }
  return out;
}

}  // namespace

std::vector<SweepOutcome> integrate_sweep_serial(const std::vector<SweepJob>& jobs) {
  std::vector<SweepOutcome> out;
  out.reserve(jobs.size());
  for (const SweepJob& job : jobs) out.push_back(run_job(job));
  return out;
}

std::vector<SweepOutcome> integrate_sweep_parallel(const std::vector<SweepJob>& jobs, int threads) {
  std::vector<SweepOutcome> out(jobs.size());
  const long n = static_cast<long>(jobs.size());
  if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < n; ++i) out[i] = run_job(jobs[i]);
  return out;
}

}  // namespace g2flow
