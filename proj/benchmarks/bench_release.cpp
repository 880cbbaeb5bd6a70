#include <benchmark/benchmark.h>

#include <cstdio>

#include "corpus_gen.hpp"
#include "smscorpus/release.hpp"

namespace {

smscorpus::CorpusSnapshot corpus(std::size_t n) {
  using namespace smscorpus;
  std::mt19937_64 rng(4);
  CorpusSnapshot s;
  const std::size_t per_batch = 50;
  for (std::size_t b = 0; b * per_batch < n; ++b) {
    char id[16];
    std::snprintf(id, sizeof id, "B%06zu", b + 1);
    SubmissionBatch batch;
    batch.id = id;
    batch.contributor_ref = std::string("C-") + id;
    batch.collection_method = CollectionMethod::export_archive;
    batch.source = Source::local;
    batch.status = Status::approved;
    for (std::size_t k = 0; k < per_batch && b * per_batch + k < n; ++k) {
      char mid[24];
      std::snprintf(mid, sizeof mid, "%s-%04zu", id, k + 1);
      Message m;
      m.id = mid;
      m.body = bench::message(rng);
      m.language = Language::english;
      m.collection_method = batch.collection_method;
      m.source = batch.source;
      m.batch_id = batch.id;
      m.status = Status::approved;
      batch.message_ids.push_back(m.id);
      s.messages.push_back(std::move(m));
    }
    s.batches.push_back(std::move(batch));
  }
  return s;
}

}  // namespace

static void BM_BuildRelease(benchmark::State& state) {
  const auto s = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        smscorpus::build_release(s, "2011-10", std::nullopt, smscorpus::Timestamp{1}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildRelease)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_ParseReleaseXml(benchmark::State& state) {
  const auto xml = smscorpus::render_release_xml(
      smscorpus::release_content(corpus(static_cast<std::size_t>(state.range(0))), "2011-10"));
  for (auto _ : state) benchmark::DoNotOptimize(smscorpus::parse_release_xml(xml));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(xml.size()));
}
BENCHMARK(BM_ParseReleaseXml)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
