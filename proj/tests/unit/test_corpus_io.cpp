#include <doctest.h>

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bitext/corpus_io.hpp"
#include "bitext/subprocess.hpp"
#include "support.hpp"

using namespace bitext;
using testing::TempDir;

namespace {

std::vector<SentencePair> read_all(const CorpusLocation& where, Utf8Mode mode = Utf8Mode::replace) {
  PairReader r(where, mode);
  std::vector<SentencePair> out;
  while (auto p = r.next()) out.push_back(std::move(*p));
  return out;
}

std::vector<SentencePair> dedup(const std::vector<SentencePair>& in, DedupKeyMode mode) {
  Deduplicator d(mode);
  std::vector<SentencePair> out;
  for (const auto& p : in)
    if (d.admit(p)) out.push_back(p);
  return out;
}

std::string random_sentence(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {"Hello", "halló", "þetta", "er", "próf", "ÆÐ", "a", "b", "7",
                                                 "\"q\"", "ü", "😀", "x-y", "end."};
  std::string s;
  const int n = 1 + static_cast<int>(rng() % 8);
  for (int i = 0; i < n; ++i) {
    if (i) s += (rng() % 5 == 0) ? "  " : " ";
    s += words[rng() % words.size()];
  }
  return s;
}

std::vector<SentencePair> random_corpus(std::mt19937_64& rng, std::size_t n) {
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < n; ++i) {
    SentencePair p;
    p.source = random_sentence(rng);
    p.target = random_sentence(rng);
    p.line_no = i + 1;
    out.push_back(std::move(p));
  }
  return out;
}

void write_all(const std::vector<SentencePair>& pairs, const CorpusLocation& where) {
  PairWriter w(where);
  for (const auto& p : pairs) w.write(p);
  w.close();
}

}  // namespace

TEST_CASE("paired files are read in order") {
  TempDir dir;
  testing::write_file(dir / "c.src", "Hello\n");
  testing::write_file(dir / "c.tgt", "Halló\n");
  const auto pairs = read_all(CorpusLocation::with_prefix(dir / "c"));
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].source == "Hello");
  CHECK(pairs[0].target == "Halló");
  CHECK(pairs[0].line_no == 1);
  CHECK(pairs[0].origin == Origin::authentic);
  CHECK(pairs[0].tags.empty());
}

TEST_CASE("CRLF and a missing final newline are tolerated") {
  TempDir dir;
  testing::write_file(dir / "c.src", "one\r\ntwo");
  testing::write_file(dir / "c.tgt", "eitt\r\ntvö\r\n");
  const auto pairs = read_all(CorpusLocation::with_prefix(dir / "c"));
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[1].source == "two");
  CHECK(pairs[1].target == "tvö");
}

TEST_CASE("paired files with different lengths are rejected") {
  TempDir dir;
  testing::write_file(dir / "c.src", "a\nb\nc\n");
  testing::write_file(dir / "c.tgt", "a\nb\n");
  CHECK_THROWS_AS(read_all(CorpusLocation::with_prefix(dir / "c")), LineCountMismatch);
  testing::write_file(dir / "d.src", "a\n");
  testing::write_file(dir / "d.tgt", "a\nb\n");
  CHECK_THROWS_AS(read_all(CorpusLocation::with_prefix(dir / "d")), LineCountMismatch);
}

TEST_CASE("TSV matches a line-split oracle") {
  TempDir dir;
  testing::write_file(dir / "small.tsv", "a\tb\nc\td\n");
  auto pairs = read_all(CorpusLocation::tsv(dir / "small.tsv"));
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].source == "a");
  CHECK(pairs[1].target == "d");

  std::mt19937_64 rng(3);
  std::string content;
  for (int i = 0; i < 500; ++i) content += random_sentence(rng) + "\t" + random_sentence(rng) + "\n";
  testing::write_file(dir / "big.tsv", content);
  pairs = read_all(CorpusLocation::tsv(dir / "big.tsv"));

  const auto oracle = proc::run_shell("awk -F'\\t' '{print NR \"|\" $1 \"|\" $2}' " + proc::shell_quote((dir / "big.tsv").string()),
                                      {}, std::chrono::seconds(30));
  REQUIRE(oracle.ok());
  std::ostringstream mine;
  for (const auto& p : pairs) mine << p.line_no << "|" << p.source << "|" << p.target << "\n";
  CHECK(mine.str() == oracle.out);
}

TEST_CASE("TSV arity is enforced") {
  TempDir dir;
  testing::write_file(dir / "one.tsv", "a\tb\nonly one\n");
  CHECK_THROWS_AS(read_all(CorpusLocation::tsv(dir / "one.tsv")), TsvArityError);
  testing::write_file(dir / "three.tsv", "a\tb\tc\n");
  CHECK_THROWS_AS(read_all(CorpusLocation::tsv(dir / "three.tsv")), TsvArityError);
}

TEST_CASE("invalid UTF-8 is replaced or rejected") {
  TempDir dir;
  testing::write_file(dir / "c.src", "ok\nbad \xFF byte\n");
  testing::write_file(dir / "c.tgt", "ok\nfine\n");
  const auto where = CorpusLocation::with_prefix(dir / "c");
  CHECK_THROWS_AS(read_all(where, Utf8Mode::strict), Utf8Error);

  PairReader r(where, Utf8Mode::replace);
  r.next();
  auto p = r.next();
  REQUIRE(p);
  CHECK(p->source == "bad \xEF\xBF\xBD byte");
  CHECK(r.invalid_utf8_replaced() == 1);
}

TEST_CASE("missing input reports the path") {
  TempDir dir;
  try {
    read_all(CorpusLocation::with_prefix(dir / "nope"));
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("nope.src") != std::string::npos);
  }
}

TEST_CASE("write then read is the identity") {
  TempDir dir;
  std::mt19937_64 rng(17);
  for (int round = 0; round < 20; ++round) {
    const auto corpus = random_corpus(rng, rng() % 200);
    const auto paired = CorpusLocation::with_prefix(dir / "p");
    const auto tsv = CorpusLocation::tsv(dir / "t.tsv");
    write_all(corpus, paired);
    write_all(corpus, tsv);
    CHECK(read_all(paired) == corpus);
    CHECK(read_all(tsv) == corpus);
  }
}

TEST_CASE("written files are LF-terminated UTF-8 without BOM") {
  TempDir dir;
  const auto where = CorpusLocation::with_prefix(dir / "w");
  PairWriter w(where);
  w.write({"a b", "c"});
  w.write({"Þ", "ð"});
  const auto stats = w.close();
  CHECK(testing::read_file(dir / "w.src") == "a b\nÞ\n");
  CHECK(testing::read_file(dir / "w.tgt") == "c\nð\n");
  CHECK(stats.pair_count == 2);
  CHECK(stats.source_tokens == 3);
  CHECK(stats.target_tokens == 2);

  PairWriter empty(CorpusLocation::with_prefix(dir / "e"));
  CHECK(empty.close().pair_count == 0);
  CHECK(testing::read_file(dir / "e.src").empty());
  CHECK(testing::read_file(dir / "e.tgt").empty());
}

TEST_CASE("writers refuse line breaks and TSV tabs") {
  TempDir dir;
  PairWriter w(CorpusLocation::with_prefix(dir / "w"));
  CHECK_THROWS_AS(w.write({"a\nb", "c"}), DataError);
  PairWriter t(CorpusLocation::tsv(dir / "t.tsv"));
  CHECK_THROWS_AS(t.write({"a\tb", "c"}), TsvArityError);
}

TEST_CASE("dedup keeps first occurrences in order") {
  const std::vector<SentencePair> in = {{"a", "b"}, {"a", "b"}, {"c", "d"}};
  const auto out = dedup(in, DedupKeyMode::exact_pair);
  REQUIRE(out.size() == 2);
  CHECK(out[0].source == "a");
  CHECK(out[1].source == "c");

  const std::vector<SentencePair> cased = {{"a", "b"}, {"A", " b"}};
  CHECK(dedup(cased, DedupKeyMode::normalized_pair).size() == 1);
  CHECK(dedup(cased, DedupKeyMode::exact_pair).size() == 2);
  CHECK(normalize_key_text("  Þetta\t ER  próf ") == "þetta er próf");

  // Source and target do not bleed into each other.
  const std::vector<SentencePair> shifted = {{"ab", "c"}, {"a", "bc"}};
  CHECK(dedup(shifted, DedupKeyMode::exact_pair).size() == 2);
}

TEST_CASE("dedup matches a set oracle") {
  std::mt19937_64 rng(99);
  std::vector<SentencePair> corpus;
  for (int i = 0; i < 9000; ++i) corpus.push_back({"src " + std::to_string(i) + " " + random_sentence(rng), "tgt " + std::to_string(rng())});
  for (int i = 0; i < 1000; ++i) {
    const auto& victim = corpus[rng() % 9000];
    corpus.insert(corpus.begin() + static_cast<long>(rng() % corpus.size() + 1), victim);
  }
  REQUIRE(corpus.size() == 10000);

  std::set<std::pair<std::string, std::string>> seen;
  std::vector<SentencePair> expected;
  for (const auto& p : corpus)
    if (seen.insert({p.source, p.target}).second) expected.push_back(p);

  Deduplicator d;
  std::vector<SentencePair> got;
  for (const auto& p : corpus)
    if (d.admit(p)) got.push_back(p);
  CHECK(got.size() == 9000);
  CHECK(got == expected);
  CHECK(d.duplicates() == 1000);
  CHECK(d.distinct_keys() == 9000);

  CHECK(dedup(got, DedupKeyMode::exact_pair) == got);
  const auto norm = dedup(corpus, DedupKeyMode::normalized_pair);
  CHECK(dedup(norm, DedupKeyMode::normalized_pair) == norm);
}

TEST_CASE("stats examples") {
  std::vector<SentencePair> one = {{"a b", "c"}};
  CorpusStats s;
  for (const auto& p : one) s.count_pair(p);
  CHECK(s.pair_count == 1);
  CHECK(s.source_tokens == 2);
  CHECK(s.target_tokens == 1);

  TempDir dir;
  testing::write_file(dir / "e.tsv", "");
  PairReader r(CorpusLocation::tsv(dir / "e.tsv"));
  const auto empty = compute_stats(r);
  CHECK(empty.pair_count == 0);
  CHECK(empty.source_tokens == 0);
  CHECK(empty.target_tokens == 0);
  CHECK(empty.total_drops() == 0);
}

TEST_CASE("token counts match wc -w") {
  TempDir dir;
  std::mt19937_64 rng(1000);
  const auto corpus = random_corpus(rng, 1000);
  const auto where = CorpusLocation::with_prefix(dir / "c");
  write_all(corpus, where);
  PairReader r(where);
  const auto stats = compute_stats(r);
  CHECK(stats.pair_count == 1000);

  auto wc = [](const std::filesystem::path& p) {
    const auto res = proc::run_shell("LC_ALL=C.UTF-8 wc -w < " + proc::shell_quote(p.string()), {}, std::chrono::seconds(30));
    REQUIRE(res.ok());
    return std::stoul(res.out);
  };
  auto wc_l = [](const std::filesystem::path& p) {
    const auto res = proc::run_shell("wc -l < " + proc::shell_quote(p.string()), {}, std::chrono::seconds(30));
    REQUIRE(res.ok());
    return std::stoul(res.out);
  };
  CHECK(stats.source_tokens == wc(dir / "c.src"));
  CHECK(stats.target_tokens == wc(dir / "c.tgt"));
  CHECK(wc_l(dir / "c.src") == 1000);
}
