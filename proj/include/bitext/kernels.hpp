#pragma once

// Batch kernels. Each comes as a serial reference and an OpenMP version;
// both write results by input position, so output order (and content) is
// identical for any thread count.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bitext/bleu.hpp"
#include "bitext/corpus_io.hpp"
#include "bitext/filters.hpp"
#include "bitext/noising.hpp"

namespace bitext::kernels {

// threads <= 0 means the OpenMP default.
int effective_threads(int threads);

std::vector<filters::ChainResult> filter_batch_serial(std::span<const SentencePair> pairs,
                                                      const filters::FilterChain& chain);
std::vector<filters::ChainResult> filter_batch_parallel(std::span<const SentencePair> pairs,
                                                        const filters::FilterChain& chain, int threads = 0);

std::vector<Key128> dedup_keys_serial(std::span<const SentencePair> pairs, const Deduplicator& dedup);
std::vector<Key128> dedup_keys_parallel(std::span<const SentencePair> pairs, const Deduplicator& dedup,
                                        int threads = 0);

// Sentence i uses the noise stream for ordinal first_ordinal + i.
std::vector<std::string> noise_batch_serial(std::span<const std::string> texts, const noising::NoiseConfig& config,
                                            std::uint64_t first_ordinal);
std::vector<std::string> noise_batch_parallel(std::span<const std::string> texts, const noising::NoiseConfig& config,
                                              std::uint64_t first_ordinal, int threads = 0);

bleu::Stats bleu_stats_serial(std::span<const std::string> hypotheses, std::span<const std::string> references);
bleu::Stats bleu_stats_parallel(std::span<const std::string> hypotheses, std::span<const std::string> references,
                                int threads = 0);

}  // namespace bitext::kernels
