#include "bitext/stages.hpp"

#include <chrono>

#include "bitext/kernels.hpp"

namespace bitext {
namespace {

std::vector<SentencePair> read_batch(PairReader& in, std::size_t n) {
  std::vector<SentencePair> batch;
  batch.reserve(n);
  while (batch.size() < n) {
    auto pair = in.next();
    if (!pair) break;
    batch.push_back(std::move(*pair));
  }
  return batch;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

StageReport run_filter_stage(PairReader& in, PairWriter& out, const filters::FilterChain& chain,
                             const StageOptions& options, const FilterObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  StageReport report;
  report.name = "filter";
  CorpusStats tally;
  for (;;) {
    auto batch = read_batch(in, options.batch_size);
    if (batch.empty()) break;
    report.input_count += batch.size();
    auto results = options.threads == 1 ? kernels::filter_batch_serial(batch, chain)
                                        : kernels::filter_batch_parallel(batch, chain, options.threads);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& r = results[i];
      if (observer) observer(batch[i], r);
      for (const auto& v : r.trail)
        if (v.action == filters::Action::fix) ++tally.per_filter_fixes[filters::to_string(v.filter)];
      if (!r.kept()) {
        ++tally.per_filter_drops[filters::to_string(r.decided_by)];
        ++tally.drop_reasons[r.reason];
        continue;
      }
      out.write(r.pair);
    }
  }
  report.output = out.close();
  report.output.per_filter_drops = std::move(tally.per_filter_drops);
  report.output.per_filter_fixes = std::move(tally.per_filter_fixes);
  report.output.drop_reasons = std::move(tally.drop_reasons);
  report.output.invalid_utf8_replaced = in.invalid_utf8_replaced();
  report.seconds = seconds_since(start);
  return report;
}

StageReport run_dedup_stage(PairReader& in, PairWriter& out, Deduplicator& dedup, const StageOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  StageReport report;
  report.name = "dedup";
  for (;;) {
    auto batch = read_batch(in, options.batch_size);
    if (batch.empty()) break;
    report.input_count += batch.size();
    // Hashing is parallel; admission stays sequential so the first occurrence wins.
    auto keys = options.threads == 1 ? kernels::dedup_keys_serial(batch, dedup)
                                     : kernels::dedup_keys_parallel(batch, dedup, options.threads);
    for (std::size_t i = 0; i < batch.size(); ++i)
      if (dedup.admit_key(keys[i])) out.write(batch[i]);
  }
  report.output = out.close();
  report.output.duplicate_count = dedup.duplicates();
  report.output.invalid_utf8_replaced = in.invalid_utf8_replaced();
  report.seconds = seconds_since(start);
  return report;
}

std::vector<SentencePair> deduplicate(std::vector<SentencePair> pairs, DedupKeyMode mode) {
  Deduplicator dedup(mode);
  std::vector<SentencePair> out;
  out.reserve(pairs.size());
  for (auto& p : pairs)
    if (dedup.admit(p)) out.push_back(std::move(p));
  return out;
}

}  // namespace bitext
