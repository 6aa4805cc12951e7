#include <benchmark/benchmark.h>

#include "mapfluct/cumulant.hpp"
#include "mapfluct/identity.hpp"
#include "mapfluct/ladder.hpp"
#include "mapfluct/simulate.hpp"

using namespace mapfluct;

namespace {

const ValidatedModel& model_a() {
  static ValidatedModel m = validate_or_throw(builtin("MODEL-A"));
  return m;
}

void BM_CgmEval(benchmark::State& state) {
  const auto& m = model_a();
  double a = 0.0;
  for (auto _ : state) {
    Matrix F = cgm_eval_real(m, a);
    benchmark::DoNotOptimize(F);
    a = a < 2.0 ? a + 1e-3 : 0.0;
  }
}
BENCHMARK(BM_CgmEval);

void BM_Perron(benchmark::State& state) {
  const auto& m = model_a();
  for (auto _ : state) {
    SpectralTriple t = perron(m, 0.8);
    benchmark::DoNotOptimize(t.kappa);
  }
}
BENCHMARK(BM_Perron);

void BM_PhiInverse(benchmark::State& state) {
  const auto& m = model_a();
  for (auto _ : state) benchmark::DoNotOptimize(phi_inverse(m, 1.3));
}
BENCHMARK(BM_PhiInverse);

void BM_LadderFactors(benchmark::State& state) {
  const auto& m = model_a();
  double q = 1.0;
  for (auto _ : state) {
    // step q to defeat the cache and measure a full root search
    q += 1e-6;
    auto L = ladder_factors(m, q);
    benchmark::DoNotOptimize(L->Xi0);
  }
}
BENCHMARK(BM_LadderFactors);

void BM_KilledPaths(benchmark::State& state) {
  const auto& m = model_a();
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto ks = killed_stats(m, 1.0, state.range(0), seed++, StartMode::per_state, 1);
    benchmark::DoNotOptimize(ks.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KilledPaths)->Arg(1000)->Arg(10000);

void BM_FirstPassage(benchmark::State& state) {
  const auto& m = model_a();
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto fp = first_passage(m, 0.5, state.range(0), seed++, std::nullopt, 50.0,
                            StartMode::per_state, 1);
    benchmark::DoNotOptimize(fp.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FirstPassage)->Arg(1000)->Arg(10000);

void BM_DensitySlice(benchmark::State& state) {
  const auto& m = model_a();
  std::vector<double> xs = {0.25, 0.5, 0.75, 1.0};
  for (auto _ : state) {
    DensitySlice d = density_matrix(m, 1.0, xs);
    benchmark::DoNotOptimize(d.values.data());
  }
}
BENCHMARK(BM_DensitySlice);

void BM_HalfLine(benchmark::State& state) {
  const auto& m = model_a();
  for (auto _ : state) {
    CMatrix H = half_line_transform(m, 0.7, 1.0, 0.0, HalfLine::nonneg);
    benchmark::DoNotOptimize(H);
  }
}
BENCHMARK(BM_HalfLine);

}  // namespace

BENCHMARK_MAIN();
