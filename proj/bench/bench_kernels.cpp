// Serial reference kernels against the fused OpenMP kernels.
// Argument: 1 = default grid (h = 0.1), 2 = twice refined (h = 0.05).
#include <benchmark/benchmark.h>

#include <random>

#include "emrecon/kernels.hpp"

using namespace emrecon;

namespace {

struct Fixture {
  Grid3 g;
  CoefficientField c;
  VectorFrame prev, curr, next;
  kernels::OperatorWorkspace ws;

  explicit Fixture(int refinement)
      : g(build_grid({{{-3.4, 3.4}, {-0.8, 0.8}, {-0.4, 0.4}}}, 0.1 / refinement)),
        c(CoefficientField::uniform(g)),
        prev(g.size()),
        curr(g.size()),
        next(g.size()) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0), e(1.0, 6.0);
    for (int d = 0; d < 3; ++d)
      for (std::size_t n = 0; n < g.size(); ++n) {
        prev.comp[d][n] = u(rng);
        curr.comp[d][n] = u(rng);
      }
    for (double& v : c.eps) v = e(rng);
    ws.resize(g.size());
  }
  kernels::Coefficients coeffs() const { return {c.eps, c.mu, 1.0}; }
};

void set_counters(benchmark::State& state, const Fixture& f) {
  state.counters["nodes"] = static_cast<double>(f.g.size());
  state.counters["nodes/s"] = benchmark::Counter(static_cast<double>(f.g.size()) * state.iterations(),
                                                 benchmark::Counter::kIsRate);
}

void BM_OperatorSerial(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    kernels::serial::apply_operator(f.g, f.curr, f.coeffs(), kernels::Penalty::EpsInsideDivergence, f.next);
    benchmark::DoNotOptimize(f.next.comp[0].data());
  }
  set_counters(state, f);
}

void BM_OperatorOmp(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    kernels::omp::apply_operator(f.g, f.curr, f.coeffs(), kernels::Penalty::EpsInsideDivergence, f.ws,
                                 f.next);
    benchmark::DoNotOptimize(f.next.comp[0].data());
  }
  set_counters(state, f);
  state.counters["threads"] = kernels::thread_count();
}

void BM_LeapfrogSerial(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    kernels::serial::leapfrog_interior(f.g, f.prev, f.curr, f.coeffs(), 0.003, f.next);
    benchmark::DoNotOptimize(f.next.comp[0].data());
  }
  set_counters(state, f);
}

void BM_LeapfrogOmp(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    kernels::omp::leapfrog_interior(f.g, f.prev, f.curr, f.coeffs(), 0.003, f.ws, f.next);
    benchmark::DoNotOptimize(f.next.comp[0].data());
  }
  set_counters(state, f);
  state.counters["threads"] = kernels::thread_count();
}

void BM_ReverseLeapfrogSerial(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    kernels::serial::reverse_leapfrog_interior(f.g, f.curr, f.coeffs(), 0.003, f.next, f.prev);
    benchmark::DoNotOptimize(f.next.comp[0].data());
  }
  set_counters(state, f);
}

void BM_ReverseLeapfrogOmp(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    kernels::omp::reverse_leapfrog_interior(f.g, f.curr, f.coeffs(), 0.003, f.ws, f.next, f.prev);
    benchmark::DoNotOptimize(f.next.comp[0].data());
  }
  set_counters(state, f);
  state.counters["threads"] = kernels::thread_count();
}

}  // namespace

BENCHMARK(BM_OperatorSerial)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_OperatorOmp)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_LeapfrogSerial)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LeapfrogOmp)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_ReverseLeapfrogSerial)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ReverseLeapfrogOmp)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
