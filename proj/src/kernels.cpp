#include "bitext/kernels.hpp"

#include <omp.h>

#include <exception>
#include <mutex>

namespace bitext::kernels {
namespace {

// Exceptions must not leave an OpenMP region; keep the first and rethrow.
class FirstError {
 public:
  template <typename F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr error_;
};

}  // namespace

int effective_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

std::vector<filters::ChainResult> filter_batch_serial(std::span<const SentencePair> pairs,
                                                      const filters::FilterChain& chain) {
  std::vector<filters::ChainResult> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = chain.apply(pairs[i]);
  return out;
}

std::vector<filters::ChainResult> filter_batch_parallel(std::span<const SentencePair> pairs,
                                                        const filters::FilterChain& chain, int threads) {
  std::vector<filters::ChainResult> out(pairs.size());
  FirstError err;
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(effective_threads(threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) err.run([&] { out[i] = chain.apply(pairs[i]); });
  err.rethrow();
  return out;
}

std::vector<Key128> dedup_keys_serial(std::span<const SentencePair> pairs, const Deduplicator& dedup) {
  std::vector<Key128> keys(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) keys[i] = dedup.key(pairs[i]);
  return keys;
}

std::vector<Key128> dedup_keys_parallel(std::span<const SentencePair> pairs, const Deduplicator& dedup, int threads) {
  std::vector<Key128> keys(pairs.size());
  FirstError err;
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(static) num_threads(effective_threads(threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) err.run([&] { keys[i] = dedup.key(pairs[i]); });
  err.rethrow();
  return keys;
}

std::vector<std::string> noise_batch_serial(std::span<const std::string> texts, const noising::NoiseConfig& config,
                                            std::uint64_t first_ordinal) {
  std::vector<std::string> out(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) out[i] = noising::noise_sentence(texts[i], config, first_ordinal + i);
  return out;
}

std::vector<std::string> noise_batch_parallel(std::span<const std::string> texts, const noising::NoiseConfig& config,
                                              std::uint64_t first_ordinal, int threads) {
  std::vector<std::string> out(texts.size());
  FirstError err;
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 256) num_threads(effective_threads(threads))
  for (std::ptrdiff_t i = 0; i < n; ++i)
    err.run([&] { out[i] = noising::noise_sentence(texts[i], config, first_ordinal + static_cast<std::uint64_t>(i)); });
  err.rethrow();
  return out;
}

bleu::Stats bleu_stats_serial(std::span<const std::string> hypotheses, std::span<const std::string> references) {
  bleu::Stats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) total += bleu::sentence_stats(hypotheses[i], references[i]);
  return total;
}

bleu::Stats bleu_stats_parallel(std::span<const std::string> hypotheses, std::span<const std::string> references,
                                int threads) {
  // Per-sentence stats by position, then a fixed-order sum.
  std::vector<bleu::Stats> parts(hypotheses.size());
  FirstError err;
  const auto n = static_cast<std::ptrdiff_t>(hypotheses.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(effective_threads(threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) err.run([&] { parts[i] = bleu::sentence_stats(hypotheses[i], references[i]); });
  err.rethrow();
  bleu::Stats total;
  for (const auto& p : parts) total += p;
  return total;
}

}  // namespace bitext::kernels
