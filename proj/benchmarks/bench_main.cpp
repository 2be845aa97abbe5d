#include <benchmark/benchmark.h>

#include <random>

#include "rdm/bd_metrics.hpp"
#include "rdm/rd_solver.hpp"
#include "rdm/task_appropriateness.hpp"
#include "rdm/theorem_suite.hpp"
#include "rdm/toy_lab.hpp"

using namespace rdm;

namespace {

std::pair<FiniteDistribution, DistortionMatrix> random_problem(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> m(n), d(n * n);
  double total = 0.0;
  for (auto& v : m) total += (v = u(rng));
  for (auto& v : m) v /= total;
  for (auto& v : d) v = u(rng);
  return {FiniteDistribution(Alphabet(n), m, 1e-10), DistortionMatrix(Alphabet(n), Alphabet(n), d)};
}

void BM_BlahutArimoto(benchmark::State& state) {
  auto [p, d] = random_problem(static_cast<std::size_t>(state.range(0)));
  const auto cfg = RDSolverConfig::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(blahut_arimoto(p, d, 5.0, cfg));
}
BENCHMARK(BM_BlahutArimoto)->Arg(4)->Arg(16)->Arg(64);

void BM_Sweep(benchmark::State& state) {
  auto [p, d] = random_problem(static_cast<std::size_t>(state.range(0)));
  const auto cfg = RDSolverConfig::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(sweep(p, d, cfg));
}
BENCHMARK(BM_Sweep)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_CheckInstance(benchmark::State& state) {
  const auto spec = default_specs("thm1", 1, 0).front();
  const auto inst = generate_instance(spec);
  const auto cfg = RDSolverConfig::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(check_instance("thm1", inst, 5, cfg));
}
BENCHMARK(BM_CheckInstance)->Unit(benchmark::kMillisecond);

void BM_Report(benchmark::State& state) {
  const auto data = sample_dataset(static_cast<std::size_t>(state.range(0)), 1);
  const auto set = toy_feature_set(data, ToySpace::LayerY);
  for (auto _ : state) benchmark::DoNotOptimize(compute_report(set));
}
BENCHMARK(BM_Report)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_BDRate(benchmark::State& state) {
  const RateMetricCurve a({{0.05, 0.41}, {0.1, 0.5}, {0.2, 0.58}, {0.4, 0.64}, {0.8, 0.67}});
  const RateMetricCurve b({{0.06, 0.42}, {0.12, 0.51}, {0.22, 0.58}, {0.41, 0.63}, {0.9, 0.68}});
  const auto fit = state.range(0) == 0 ? BDFit::Cubic : BDFit::Pchip;
  for (auto _ : state) benchmark::DoNotOptimize(bd_rate(a, b, fit));
}
BENCHMARK(BM_BDRate)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
