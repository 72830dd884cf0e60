#pragma once

// Streaming stage drivers: read a batch, run a kernel over it, emit results
// in input order. Memory is bounded by the batch size (plus the dedup key set).

#include <cstddef>
#include <functional>

#include "bitext/corpus_io.hpp"
#include "bitext/filters.hpp"
#include "bitext/report.hpp"

namespace bitext {

struct StageOptions {
  int threads = 1;             // 1 runs the serial kernels
  std::size_t batch_size = 4096;
};

using FilterObserver = std::function<void(const SentencePair& input, const filters::ChainResult& result)>;

StageReport run_filter_stage(PairReader& in, PairWriter& out, const filters::FilterChain& chain,
                             const StageOptions& options = {}, const FilterObserver& observer = {});

StageReport run_dedup_stage(PairReader& in, PairWriter& out, Deduplicator& dedup, const StageOptions& options = {});

// Dedup applied to an in-memory list, preserving the order of survivors.
std::vector<SentencePair> deduplicate(std::vector<SentencePair> pairs, DedupKeyMode mode);

}  // namespace bitext
