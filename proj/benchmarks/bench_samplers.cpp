#include <benchmark/benchmark.h>

#include "lbexact/chain.hpp"
#include "lbexact/dominating.hpp"
#include "lbexact/sampler.hpp"

namespace lbexact {
namespace {

void BM_Philox(benchmark::State& state) {
  CounterStream rng(1, StreamDomain::kAux, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng());
}
BENCHMARK(BM_Philox);

PolicyDescriptor policy_at(std::int64_t i) {
  switch (i) {
    case 0: return PolicyDescriptor::uniform_routing();
    case 1: return PolicyDescriptor::join_shortest();
    case 2: return PolicyDescriptor::power_of_d(2);
    case 3: return PolicyDescriptor::idle_one_first();
    default: return PolicyDescriptor::mmc_steal();
  }
}

void BM_StepSorted(benchmark::State& state) {
  const std::size_t c = static_cast<std::size_t>(state.range(1));
  const NetworkParams params(c, 0.9 * static_cast<double>(c));
  const PolicyDescriptor policy = policy_at(state.range(0));
  CounterStream rng(2, StreamDomain::kAux, 0);
  SortedLengths s(c, 0);
  for (auto _ : state) {
    step_sorted(s, draw_mark(params, rng), StepRandomness{rng()}, policy);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetLabel(policy.name());
}
BENCHMARK(BM_StepSorted)->ArgsProduct({{0, 1, 2, 3, 4}, {4, 64, 1024}});

void BM_StepGeneric(benchmark::State& state) {
  const std::size_t c = static_cast<std::size_t>(state.range(0));
  const NetworkParams params(c, 0.9 * static_cast<double>(c));
  const auto policy = PolicyDescriptor::graph_restricted(PolicyDescriptor::join_shortest(), Topology::ring(c));
  CounterStream rng(3, StreamDomain::kAux, 0);
  QueueState x = QueueState::empty(c);
  SortedView v = sort_state(x);
  for (auto _ : state) {
    step_generic(x, v, draw_mark(params, rng), StepRandomness{rng()}, policy);
    benchmark::DoNotOptimize(v.sigma.data());
  }
}
BENCHMARK(BM_StepGeneric)->Arg(4)->Arg(64)->Arg(1024);

void BM_BackwardExtend(benchmark::State& state) {
  const std::size_t c = static_cast<std::size_t>(state.range(0));
  const NetworkParams params(c, 0.9 * static_cast<double>(c));
  CounterStream rng(4, StreamDomain::kAux, 0);
  BackwardSegment seg(sorted_lengths(sample_stationary(params, rng).lengths()));
  for (auto _ : state) seg.extend(params, rng);
}
BENCHMARK(BM_BackwardExtend)->Arg(4)->Arg(64);

void BM_Draw(benchmark::State& state) {
  const auto algorithm = state.range(0) == 0 ? Algorithm::kDomCftpEmpty : Algorithm::kDomCftpSandwich;
  const std::size_t c = static_cast<std::size_t>(state.range(1));
  const NetworkParams params(c, 0.75 * static_cast<double>(c));
  const PolicyDescriptor policy = policy_at(state.range(2));
  SamplerOptions options;
  options.verify = false;
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_one(params, policy, algorithm, {5, i++}, options));
  }
  state.SetLabel(std::string(algorithm_name(algorithm)) + " " + policy.name());
}
BENCHMARK(BM_Draw)->ArgsProduct({{0, 1}, {2, 4, 8}, {1, 2, 4}});

void BM_SampleMany(benchmark::State& state) {
  SamplerConfig config{NetworkParams(4, 3.0), PolicyDescriptor::power_of_d(2), Algorithm::kDomCftpEmpty, 6};
  const auto workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_many(config, 2000, workers));
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_SampleMany)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime();

}  // namespace
}  // namespace lbexact

BENCHMARK_MAIN();
