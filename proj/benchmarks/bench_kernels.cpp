#include <benchmark/benchmark.h>

#include <vector>

#include "physattn/attention.hpp"
#include "physattn/harness.hpp"
#include "physattn/masking.hpp"
#include "physattn/priors.hpp"
#include "physattn/rng.hpp"

using namespace physattn;

namespace {

FeatureSequence noise_sequence(std::size_t frames, std::size_t side, std::size_t depth) {
  const RngHandle rng(1, "bench");
  std::vector<double> v(frames * side * side * depth);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.normal(i);
  return FeatureSequence(frames, {side, side, depth}, std::move(v));
}

void BM_HeatStep(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  const auto x = noise_sequence(8, side, 16);
  const auto m = MaskSequence::filled(8, side, side, true);
  const ControlParams p = derive_params(0.5);
  const RngHandle rng(2, "noise");
  for (auto _ : state) {
    auto r = priors::step_prior(x, nullptr, m, {}, p, OperatorSchedule(1, 0.1), &rng);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_HeatStep)->Arg(8)->Arg(32);

void BM_Otsu(benchmark::State& state) {
  const RngHandle rng(3, "otsu");
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.uniform(i);
  for (auto _ : state) benchmark::DoNotOptimize(masking::otsu_threshold(v));
}
BENCHMARK(BM_Otsu)->Arg(64)->Arg(4096);

void BM_Attention(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  const auto x = noise_sequence(4, side, 16);
  const auto proj = attention::ProjectionSet::random_orthogonal(16, RngHandle(4, "proj"));
  for (auto _ : state) {
    auto out = attention::self_attention(x, proj);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_Attention)->Arg(8)->Arg(16);

void BM_Algorithm1(benchmark::State& state) {
  const harness::StoryScenario s = harness::build_scenario({}, 5);
  const auto proj = harness::default_projections(s.channels, 5);
  for (auto _ : state) {
    auto r = harness::run_algorithm1(s, derive_params(0.5), {}, OperatorSchedule(10, 0.1), 20, proj);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Algorithm1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
