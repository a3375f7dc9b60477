#include <benchmark/benchmark.h>

#include "lsdp/lsdp.hpp"

using namespace lsdp;

namespace {

void BM_IsingInstance(benchmark::State& state) {
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ising_instance(7, i++));
  }
}
BENCHMARK(BM_IsingInstance);

// Full D-outcome covariance near the threshold, where the solver works hardest.
void BM_TriangleFamily(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto cov = family_covariance(3, d, 0.2929);
  const auto tri = triangle_dag();
  std::size_t iters = 0;
  for (auto _ : state) {
    const auto r = test_compatibility(cov, tri);
    iters = r.iterations;
    benchmark::DoNotOptimize(r);
  }
  state.counters["solver_iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_TriangleFamily)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_TriangleFamilyDykstra(benchmark::State& state) {
  const auto cov = family_covariance(3, static_cast<std::size_t>(state.range(0)), 0.2929);
  const auto tri = triangle_dag();
  std::size_t iters = 0;
  for (auto _ : state) {
    const auto r = test_compatibility(cov, tri, {}, SolverKind::Dykstra);
    iters = r.iterations;
    benchmark::DoNotOptimize(r);
  }
  state.counters["solver_iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_TriangleFamilyDykstra)->Arg(2)->Arg(8);

void BM_ReducedFamily(benchmark::State& state) {
  const auto tri = triangle_dag();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reduced_family_test(0.2929, tri));
  }
}
BENCHMARK(BM_ReducedFamily);

void BM_RandomModel(benchmark::State& state) {
  CounterRng rng(11, 0);
  const auto dag = random_bipartite_dag(rng, 5, 4);
  const auto cov = model_covariance(random_latent_model(dag, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(test_compatibility(cov, dag));
  }
}
BENCHMARK(BM_RandomModel);

void BM_FamilyEntropies(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(family_entropic_values(d, 0.29));
  }
}
BENCHMARK(BM_FamilyEntropies)->Arg(2)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
