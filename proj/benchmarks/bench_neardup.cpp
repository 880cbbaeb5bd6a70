#include <benchmark/benchmark.h>

#include "corpus_gen.hpp"
#include "smscorpus/validate.hpp"

static void BM_NearDuplicateLookup(benchmark::State& state) {
  std::mt19937_64 rng(2);
  smscorpus::DuplicateIndex index;
  for (int64_t i = 0; i < state.range(0); ++i) {
    index.add(smscorpus::Reference{"M" + std::to_string(i), bench::message(rng)});
  }
  const std::string probe = bench::message(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(smscorpus::find_near_duplicates(probe, index, 0.8));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NearDuplicateLookup)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_Similarity(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto a = bench::message(rng);
  const auto b = bench::message(rng);
  for (auto _ : state) benchmark::DoNotOptimize(smscorpus::similarity(a, b));
}
BENCHMARK(BM_Similarity);

BENCHMARK_MAIN();
