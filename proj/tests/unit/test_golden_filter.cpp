#include <doctest.h>

#include <map>

#include "bitext/corpus_io.hpp"
#include "bitext/filters.hpp"
#include "bitext/stages.hpp"
#include "golden.hpp"
#include "support.hpp"

using namespace bitext;

TEST_CASE("every planted defect category is present") {
  std::map<std::string, int> counts;
  for (const auto& g : testing::golden_corpus()) ++counts[g.defect];
  for (const char* d : {"clean", "empty_source", "empty_target", "mojibake", "unresolvable_encoding", "charset_target",
                        "charset_source", "length_ratio", "digit_mismatch", "near_copy", "typographic_quotes"}) {
    CAPTURE(d);
    CHECK(counts[d] >= 20);
  }
}

TEST_CASE("default chain verdicts match the planted labels") {
  const filters::FilterChain chain(filters::FilterConfig{}, filters::default_chain());
  const auto corpus = testing::golden_corpus();
  std::size_t mismatches = 0;
  for (const auto& g : corpus) {
    const auto r = chain.apply(g.input);
    bool ok = r.kept() == g.keep;
    if (ok && g.keep) ok = r.pair.source == g.expected.source && r.pair.target == g.expected.target;
    if (ok && !g.keep) ok = r.reason == g.reason && filters::to_string(r.decided_by) == g.filter;
    if (!ok) {
      ++mismatches;
      MESSAGE("line " << g.input.line_no << " (" << g.defect << "): got " << filters::to_string(r.action) << " "
                      << r.reason);
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("streaming filter stage reconciles to the line") {
  testing::TempDir dir;
  const auto corpus = testing::golden_corpus();
  {
    PairWriter w(CorpusLocation::with_prefix(dir / "in"));
    for (const auto& g : corpus) w.write(g.input);
    w.close();
  }
  std::map<std::string, std::size_t> expected_reasons, expected_drops;
  std::size_t expected_kept = 0;
  for (const auto& g : corpus) {
    if (g.keep) {
      ++expected_kept;
    } else {
      ++expected_reasons[g.reason];
      ++expected_drops[g.filter];
    }
  }
  for (int threads : {1, 3}) {
    PairReader in(CorpusLocation::with_prefix(dir / "in"));
    PairWriter out(CorpusLocation::with_prefix(dir / "out"));
    StageOptions opts;
    opts.threads = threads;
    opts.batch_size = 97;
    const auto report = run_filter_stage(in, out, filters::FilterChain({}, filters::default_chain()), opts);
    CHECK(report.input_count == corpus.size());
    CHECK(report.output.pair_count == expected_kept);
    CHECK(report.output.drop_reasons == expected_reasons);
    CHECK(report.output.per_filter_drops == expected_drops);
    CHECK(report.reconciles());
    CHECK(report.input_count == report.output.pair_count + report.output.total_drops());

    PairReader back(CorpusLocation::with_prefix(dir / "out"));
    std::size_t i = 0;
    for (const auto& g : corpus) {
      if (!g.keep) continue;
      auto p = back.next();
      REQUIRE(p);
      CHECK(p->source == g.expected.source);
      CHECK(p->target == g.expected.target);
      ++i;
    }
    CHECK_FALSE(back.next());
    CHECK(i == expected_kept);
  }
}
