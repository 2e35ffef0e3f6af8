#include <benchmark/benchmark.h>

#include "g2flow/sweep.hpp"

using namespace g2flow;

namespace {

std::vector<SweepJob> make_jobs(int count) {
  const KForm phi = KForm::from_terms(3, {{{1, 6, 7}, 1.0},
                                          {{2, 5, 7}, 1.0},
                                          {{3, 4, 7}, 1.0},
                                          {{1, 3, 5}, 1.0},
                                          {{1, 2, 4}, -1.0},
                                          {{2, 3, 6}, -1.0},
                                          {{4, 5, 6}, -1.0}});
  std::vector<SweepJob> jobs;
  for (int n = 0; n < count; ++n) {
    SweepJob job;
    job.phi = phi;
    job.mu.set(7, 1, 6, 1.0);
    job.mu.set(7, 6, 1, 1.0);
    job.mu.set(7, 3, 4, 1.0);
    job.mu.set(7, 4, 3, 1.0);
    job.mu.set(7, 2, 5, 0.1 * n);
    job.t_end = 0.05;
    jobs.push_back(job);
  }
  return jobs;
}

void BM_SweepSerial(benchmark::State& state) {
  const std::vector<SweepJob> jobs = make_jobs(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_sweep_serial(jobs));
}

void BM_SweepParallel(benchmark::State& state) {
  const std::vector<SweepJob> jobs = make_jobs(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_sweep_parallel(jobs));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
