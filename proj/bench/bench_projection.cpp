// Serial reference vs OpenMP evaluation of the hysteresis projection and the
// pointwise G_R field it is built on.
#include <benchmark/benchmark.h>

#include <random>

#include "hystwave/galerkin.hpp"

using namespace hystwave;

namespace {

struct Fixture {
  Discretization disc;
  PreisachEvaluator eval;
  ModalCoeffs p;
};

Fixture make_fixture(int m) {
  const auto n_t = static_cast<std::size_t>(32 * m);
  Discretization disc = make_discretization(1.0, 1.0, m, n_t, static_cast<std::size_t>(4 * m + 8));
  PreisachDensity d = PreisachDensity::gaussian_in_v({1.0, 1.0, 10.0});
  d = d.with_constants(validate_density(d, 0.3));
  ModalCoeffs p(m, 0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-0.01, 0.01);
  for (double& v : p.flat()) v = U(rng);
  return {std::move(disc), PreisachEvaluator(d, 16), std::move(p)};
}

void projection(benchmark::State& state, Execution exec) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hysteresis_projection(f.p, f.disc, f.eval, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.disc.basis.n_quad()));
}

void g_field(benchmark::State& state, Execution exec) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(periodic_g_R_field(f.p, f.disc, f.eval, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.disc.basis.n_quad()));
}

}  // namespace

BENCHMARK_CAPTURE(projection, serial, Execution::serial)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(projection, parallel, Execution::parallel)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(g_field, serial, Execution::serial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(g_field, parallel, Execution::parallel)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
