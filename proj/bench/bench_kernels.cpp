// Serial reference kernels against their OpenMP versions.
//
//   bitext_bench --benchmark_filter=filter

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "bitext/kernels.hpp"

using namespace bitext;

namespace {

const char* const kEnglish[] = {"the", "weather", "house", "river", "mountain", "people", "ship", "harbour",
                                "winter", "summer", "children", "book", "road", "village", "fish", "sheep"};
const char* const kIcelandic[] = {"veðrið", "húsið", "áin", "fjallið", "fólkið", "skipið", "höfnin", "vetur",
                                  "sumar", "börnin", "bókin", "vegurinn", "þorpið", "fiskur", "kindur", "kvöld"};

std::string sentence(std::mt19937_64& rng, const char* const* words) {
  std::string s;
  const int n = 4 + static_cast<int>(rng() % 16);
  for (int i = 0; i < n; ++i) {
    if (i) s.push_back(' ');
    s += words[rng() % 16];
  }
  return s + ".";
}

const std::vector<SentencePair>& corpus() {
  static const std::vector<SentencePair> pairs = [] {
    std::mt19937_64 rng(1);
    std::vector<SentencePair> out;
    for (std::size_t i = 0; i < 20000; ++i) {
      SentencePair p;
      p.source = sentence(rng, kEnglish);
      p.target = sentence(rng, kIcelandic);
      p.line_no = i + 1;
      out.push_back(std::move(p));
    }
    return out;
  }();
  return pairs;
}

std::vector<std::string> sources() {
  std::vector<std::string> out;
  for (const auto& p : corpus()) out.push_back(p.source);
  return out;
}

// range(0) is the thread count; 0 selects the serial kernel.
void BM_filter(benchmark::State& state) {
  const filters::FilterChain chain(filters::FilterConfig{}, filters::default_chain());
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = threads == 0 ? kernels::filter_batch_serial(corpus(), chain)
                          : kernels::filter_batch_parallel(corpus(), chain, threads);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().size()));
}

void BM_dedup_keys(benchmark::State& state) {
  const Deduplicator dedup(DedupKeyMode::normalized_pair);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = threads == 0 ? kernels::dedup_keys_serial(corpus(), dedup)
                          : kernels::dedup_keys_parallel(corpus(), dedup, threads);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().size()));
}

void BM_noise(benchmark::State& state) {
  const auto texts = sources();
  noising::NoiseConfig config;
  config.seed = 3;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = threads == 0 ? kernels::noise_batch_serial(texts, config, 0)
                          : kernels::noise_batch_parallel(texts, config, 0, threads);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(texts.size()));
}

void BM_bleu_stats(benchmark::State& state) {
  const auto hyps = sources();
  auto refs = sources();
  std::rotate(refs.begin(), refs.begin() + 1, refs.end());
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto s = threads == 0 ? kernels::bleu_stats_serial(hyps, refs) : kernels::bleu_stats_parallel(hyps, refs, threads);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(hyps.size()));
}

void thread_args(benchmark::internal::Benchmark* b) {
  b->Arg(0);
  for (int t = 1; t <= kernels::effective_threads(0); t *= 2) b->Arg(t);
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_filter)->Apply(thread_args);
BENCHMARK(BM_dedup_keys)->Apply(thread_args);
BENCHMARK(BM_noise)->Apply(thread_args);
BENCHMARK(BM_bleu_stats)->Apply(thread_args);

BENCHMARK_MAIN();
