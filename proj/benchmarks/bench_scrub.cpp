#include <benchmark/benchmark.h>

#include <vector>

#include "corpus_gen.hpp"
#include "smscorpus/anonymize.hpp"

static void BM_ScrubBody(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<std::string> bodies;
  for (int i = 0; i < 1000; ++i) bodies.push_back(bench::message(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smscorpus::scrub_body(bodies[i++ % bodies.size()]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ScrubBody);

static void BM_Pseudonymize(benchmark::State& state) {
  smscorpus::PseudonymKey key;
  key.key_bytes.assign(32, 7);
  std::uint64_t n = 91230000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smscorpus::pseudonymize_number(std::to_string(n++), key));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Pseudonymize);

BENCHMARK_MAIN();
