#include <benchmark/benchmark.h>

#include "mscale/estimators.hpp"
#include "mscale/limit_laws.hpp"

using namespace mscale;

namespace {

Execution mode(const benchmark::State& st) { return st.range(0) ? Execution::parallel : Execution::serial; }

LimitConfig bench_limit() {
  LimitConfig c;
  c.L = 6.0;
  c.M = 40.0;
  c.replicas = 16;
  return c;
}

void BM_figure2_sweep(benchmark::State& st) {
  const LimitConfig c = bench_limit();
  const std::vector<Statistic> stats{Statistic::f1(), Statistic::f2(), Statistic::f3()};
  for (auto _ : st) benchmark::DoNotOptimize(figure2_sweep(c, {0.0, 1.0, 2.0, 4.0, 8.0}, stats, mode(st)));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * c.replicas));
}

void BM_theta(benchmark::State& st) {
  const Window w{2, 2.4, Boundary::periodic};
  for (auto _ : st) benchmark::DoNotOptimize(estimate_theta(150.0, 0.1, w, 1.0, 64, 1, mode(st)));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * 64));
}

void BM_lambda_c(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(estimate_lambda_c(0.1, 2, {3.0}, default_lambda_sweep(0.1, 2, 3), 16, 1, mode(st)));
}

// Membership kernels on one replica: local box graph vs full torus rebuild.
void BM_mask_kernel(benchmark::State& st) {
  LimitConfig c = bench_limit();
  c.M = 10.0;
  const Kernel k = st.range(0) ? Kernel::reference : Kernel::fast;
  for (auto _ : st) benchmark::DoNotOptimize(sample_xi_typical(c, 0, k));
}

}  // namespace

BENCHMARK(BM_figure2_sweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_theta)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lambda_c)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mask_kernel)->ArgName("reference")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
