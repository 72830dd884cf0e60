#include <doctest.h>

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "bitext/filters.hpp"
#include "bitext/kernels.hpp"
#include "bitext/levenshtein.hpp"
#include "bitext/utf8.hpp"
#include "support.hpp"

using namespace bitext;
using namespace bitext::filters;

namespace {

SentencePair pair(std::string s, std::string t) {
  SentencePair p;
  p.source = std::move(s);
  p.target = std::move(t);
  return p;
}

std::size_t dp_distance(const std::u32string& a, const std::u32string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string random_unicode(std::mt19937_64& rng, std::size_t len) {
  static const std::u32string special = U"“”„‘’‚‛′″–—―−…   　​‌‍⁠﻿­ \t«»\"'-.";
  std::u32string s;
  for (std::size_t i = 0; i < len; ++i) {
    switch (rng() % 4) {
      case 0: s.push_back(special[rng() % special.size()]); break;
      case 1: s.push_back(U'a' + rng() % 26); break;
      case 2: {
        char32_t cp = 0x80 + rng() % 0xFF00;
        if (cp >= 0xD800 && cp <= 0xDFFF) cp = U'x';
        s.push_back(cp);
        break;
      }
      default: s.push_back(0x10000 + rng() % 0x1000);
    }
  }
  return utf8::encode(s);
}

}  // namespace

TEST_CASE("filter_empty") {
  CHECK(filter_empty(pair("", "x")).reason == "empty_source");
  CHECK(filter_empty(pair("  \t ", "x")).reason == "empty_source");
  CHECK(filter_empty(pair("x", " ")).reason == "empty_target");
  CHECK(filter_empty(pair("a", "b")).action == Action::keep);
}

TEST_CASE("filter_length") {
  FilterConfig c;
  c.length_ratio_max = 2.0;
  auto v = filter_length(pair("one two three four", "einn"), c);
  CHECK(v.action == Action::drop);
  CHECK(v.reason == "length_ratio");
  CHECK(filter_length(pair("one two", "einn"), c).action == Action::keep);  // 2/1 is not > 2
  CHECK(filter_length(pair("a b", "c d"), FilterConfig{}).action == Action::keep);

  FilterConfig small;
  small.min_chars = 3;
  small.max_chars = 10;
  small.max_tokens = 3;
  CHECK(filter_length(pair("ab", "abc"), small).reason == "too_short_source");
  CHECK(filter_length(pair("abc", "ab"), small).reason == "too_short_target");
  CHECK(filter_length(pair("abcdefghijk", "abc"), small).reason == "too_long_source");
  CHECK(filter_length(pair("ááááá", "ððððð"), small).action == Action::keep);  // codepoints, not bytes
  CHECK(filter_length(pair("a b c d", "abc"), small).reason == "too_many_tokens_source");
  CHECK(filter_length(pair("abc", "a b c d"), small).reason == "too_many_tokens_target");
}

TEST_CASE("filter_charset") {
  FilterConfig c;
  CHECK(filter_charset(pair("This is a test", "Þetta er próf"), c).action == Action::keep);
  CHECK(filter_charset(pair("This is a test", "Þetta er 漢字"), c).reason == "charset_target");
  CHECK(filter_charset(pair("Þetta", "Þetta"), c).reason == "charset_source");  // Þ is not English
  CHECK(filter_charset(pair("“Quotes” – fine…", "„Gæsalappir“ – fínt…"), c).action == Action::keep);
  c.charset_tolerance = 0.25;
  CHECK(filter_charset(pair("abcd", "abc漢"), c).action == Action::keep);
  CHECK(filter_charset(pair("abcd", "ab漢漢"), c).reason == "charset_target");
}

TEST_CASE("filter_case_symbol_mismatch") {
  FilterConfig c;
  CHECK(filter_case_symbol_mismatch(pair("Room 101", "Herbergi 101"), c).action == Action::keep);
  CHECK(filter_case_symbol_mismatch(pair("Room 101", "Herbergi 11"), c).reason == "digit_mismatch");
  CHECK(filter_case_symbol_mismatch(pair("Room 101", "Herbergi 110"), c).action == Action::keep);  // multiset
  CHECK(filter_case_symbol_mismatch(pair("HELLO THERE", "halló þar"), c).reason == "case_mismatch");
  CHECK(filter_case_symbol_mismatch(pair("HALLÓ ÞAR", "hello there"), c).reason == "case_mismatch");
  CHECK(filter_case_symbol_mismatch(pair("HELLO THERE", "HALLÓ ÞAR"), c).action == Action::keep);
  CHECK(filter_case_symbol_mismatch(pair("OK then", "allt í lagi"), c).action == Action::keep);
  CHECK(filter_case_symbol_mismatch(pair("What?!? (yes) [no]", "Hvað"), c).reason == "symbol_mismatch");
  CHECK(filter_case_symbol_mismatch(pair("What?!", "Hvað"), c).action == Action::keep);  // within slack 2
}

TEST_CASE("filter_edit_distance") {
  FilterConfig c;
  CHECK(filter_edit_distance(pair("www.example.com", "www.example.com"), c).reason == "near_copy");
  const auto hw = filter_edit_distance(pair("Hello world", "Halló heimur"), c);
  CHECK(hw.action == Action::keep);
  const auto d = dp_distance(utf8::decode("Hello world"), utf8::decode("Halló heimur"));
  CHECK(normalized_edit_distance("Hello world", "Halló heimur") == doctest::Approx(double(d) / 12.0));
  CHECK(double(d) / 12.0 >= 0.3);

  const std::string x = "The quick brown fox jumps over the lazy dog near the riverbank";
  CHECK(dp_distance(utf8::decode(x), utf8::decode(x + "!")) == 1);
  CHECK(filter_edit_distance(pair(x, x + "!"), c).reason == "near_copy");
}

TEST_CASE("filter_edit_distance agrees with the DP threshold on random pairs") {
  std::mt19937_64 rng(3);
  FilterConfig c;
  const std::u32string alphabet = U"abcá ";
  for (int i = 0; i < 2000; ++i) {
    std::u32string a, b;
    const std::size_t la = 1 + rng() % 40, lb = 1 + rng() % 40;
    for (std::size_t k = 0; k < la; ++k) a.push_back(alphabet[rng() % alphabet.size()]);
    if (rng() % 2) {
      b = a;
      for (int e = 0; e < 3 && !b.empty(); ++e) b[rng() % b.size()] = alphabet[rng() % alphabet.size()];
    } else {
      for (std::size_t k = 0; k < lb; ++k) b.push_back(alphabet[rng() % alphabet.size()]);
    }
    const double norm = double(dp_distance(a, b)) / double(std::max(a.size(), b.size()));
    const bool expect_drop = norm < c.edit_distance_min_normalized;
    CHECK((filter_edit_distance(pair(utf8::encode(a), utf8::encode(b)), c).action == Action::drop) == expect_drop);
  }
}

TEST_CASE("normalize_punctuation") {
  CHECK(normalize_punctuation("“Hi”") == "\"Hi\"");
  CHECK(normalize_punctuation("a b") == "a b");
  CHECK(normalize_punctuation("‘it’s’") == "'it's'");
  CHECK(normalize_punctuation("„Já“") == "\"Já\"");
  CHECK(normalize_punctuation("a – b — c") == "a - b - c");
  CHECK(normalize_punctuation("a – b", false) == "a – b");
  CHECK(normalize_punctuation("bíddu…") == "bíddu...");
  CHECK(normalize_punctuation("zero​width﻿") == "zerowidth");
  CHECK(normalize_punctuation("  many   spaces\t here  ") == "many spaces here");
  CHECK(normalize_punctuation("«gæsalappir»") == "«gæsalappir»");
}

TEST_CASE("normalize_punctuation is idempotent on random Unicode") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5000; ++i) {
    const auto s = random_unicode(rng, rng() % 30);
    const auto once = normalize_punctuation(s);
    CHECK(normalize_punctuation(once) == once);
    CHECK(once.find_first_of("\r\n") == std::string::npos);
    CHECK(utf8::is_valid(once));
  }
}

TEST_CASE("fix_encoding") {
  const auto table = MojibakeTable::builtin();
  auto r = fix_encoding("Ã¡", table);
  CHECK(r.status == EncodingFix::Status::fixed);
  CHECK(r.text == "á");
  r = fix_encoding("Þetta er hreinn texti.", table);
  CHECK(r.status == EncodingFix::Status::clean);
  CHECK(r.text == "Þetta er hreinn texti.");
  CHECK(fix_encoding("bro\xEF\xBF\xBDken", table).status == EncodingFix::Status::unresolved);

  MojibakeTable custom;
  custom.entries = {{"Ã¡", "á"}};
  custom.finalize();
  CHECK(fix_encoding("hÃ¡r", custom).text == "hár");
}

TEST_CASE("fix_encoding undoes Latin-1 and Windows-1252 misdecoding") {
  std::ifstream in(testing::data_path("mojibake_fixture.json"));
  const auto fixture = nlohmann::json::parse(in);
  const auto table = MojibakeTable::builtin();
  for (const auto& c : fixture["cases"]) {
    const auto original = c["original"].get<std::string>();
    for (const char* variant : {"latin1", "cp1252"}) {
      const auto broken = c[variant].get<std::string>();
      CAPTURE(original);
      CAPTURE(variant);
      const auto r = fix_encoding(broken, table);
      CHECK(r.text == original);
      CHECK(fix_encoding(r.text, table).text == r.text);
    }
  }
}

TEST_CASE("the shipped mojibake table equals the built-in one") {
  const auto loaded = MojibakeTable::load(std::string(BITEXT_SOURCE_DIR) + "/config/mojibake_is.tsv");
  const auto builtin = MojibakeTable::builtin();
  CHECK(loaded.entries == builtin.entries);
  CHECK(loaded.leads == builtin.leads);
}

TEST_CASE("table loading") {
  testing::TempDir dir;
  testing::write_file(dir / "t.tsv", "# comment\n\nA\\u00E1\tá\nx\\ty\tz\nback\\\\slash\t/\n");
  const auto t = MojibakeTable::load(dir / "t.tsv");
  REQUIRE(t.entries.size() == 3);
  CHECK(t.entries[0].first == "Aá");
  CHECK(t.entries[1].first == "x\ty");
  CHECK(t.entries[2].first == "back\\slash");
  testing::write_file(dir / "bad.tsv", "no tab here\n");
  CHECK_THROWS_AS(MojibakeTable::load(dir / "bad.tsv"), ConfigError);
}

TEST_CASE("regex fixes from the OCR starter table") {
  const auto fixes = load_regex_fixes(std::string(BITEXT_SOURCE_DIR) + "/config/ocr_fixes_is.tsv");
  FilterConfig c;
  c.regex_fixes = fixes;
  auto v = filter_regex_fix(pair("ﬁsh", "ﬁskur og đ"), c);
  CHECK(v.action == Action::fix);
  CHECK(v.new_source == "fish");
  CHECK(v.new_target == "fiskur og ð");
  v = filter_regex_fix(pair("ok", "á ö"), c);
  CHECK(v.new_target == "á ö");
  CHECK(filter_regex_fix(pair("clean", "hreint"), c).action == Action::keep);
  CHECK_THROWS_AS(make_regex_fix("a", "b\nc"), ConfigError);
  CHECK_THROWS_AS(make_regex_fix("(", "x"), ConfigError);
  CHECK(make_regex_fix("(\\d+)-(\\d+)", "$2-$1").re.mark_count() == 2);
}

TEST_CASE("filter chain") {
  const FilterChain chain(FilterConfig{}, default_chain());
  auto r = chain.apply(pair("", "x"));
  CHECK(r.action == Action::drop);
  CHECK(r.reason == "empty_source");
  CHECK(r.trail.size() == 1);

  r = chain.apply(pair("The weather is good today.", "Veðrið er gott í dag."));
  CHECK(r.action == Action::keep);
  CHECK(r.trail.size() == default_chain().size());
  for (const auto& v : r.trail) CHECK(v.action == Action::keep);

  // fixes feed later filters: normalized quotes, then kept
  r = chain.apply(pair("“The weather”", "„Veðrið“"));
  CHECK(r.action == Action::fix);
  CHECK(r.kept());
  CHECK(r.pair.source == "\"The weather\"");
  CHECK(r.pair.target == "\"Veðrið\"");

  // repaired mojibake is judged on the repaired text
  r = chain.apply(pair("The weather", "VeÃ°riÃ° er gott"));
  CHECK(r.kept());
  CHECK(r.pair.target == "Veðrið er gott");

  CHECK_THROWS_AS(parse_filter_id("no_such_filter"), ConfigError);
  CHECK(parse_filter_id("edit_distance") == FilterId::edit_distance);
  CHECK_THROWS_AS(FilterChain(FilterConfig{}, {}), ConfigError);
}

TEST_CASE("config invariants") {
  FilterConfig c;
  c.min_chars = 10;
  c.max_chars = 5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FilterConfig{};
  c.length_ratio_max = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FilterConfig{};
  c.edit_distance_min_normalized = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("chain output equals composed fixes; drop-only chains never rewrite") {
  std::mt19937_64 rng(5);
  const FilterConfig config;
  const FilterChain fixes_only(config, {FilterId::fix_encoding, FilterId::normalize_punctuation});
  const FilterChain drops_only(config, {FilterId::empty, FilterId::length, FilterId::charset, FilterId::case_symbol,
                                        FilterId::edit_distance});
  for (int i = 0; i < 2000; ++i) {
    const auto p = pair(random_unicode(rng, rng() % 20), random_unicode(rng, rng() % 20));
    const auto r = fixes_only.apply(p);
    SentencePair expected = p;
    if (auto v = filter_fix_encoding(expected, config); v.action == Action::fix) {
      expected.source = v.new_source;
      expected.target = v.new_target;
    }
    if (r.action == Action::drop) continue;
    if (auto v = filter_normalize_punctuation(expected, config); v.action == Action::fix) {
      expected.source = v.new_source;
      expected.target = v.new_target;
    }
    CHECK(r.pair == expected);
    const auto d = drops_only.apply(p);
    CHECK(d.pair == p);
  }
}

TEST_CASE("parallel verdicts equal serial verdicts") {
  std::mt19937_64 rng(8);
  std::vector<SentencePair> pairs;
  for (int i = 0; i < 3000; ++i) pairs.push_back(pair(random_unicode(rng, rng() % 25), random_unicode(rng, rng() % 25)));
  const FilterChain chain(FilterConfig{}, default_chain());
  const auto serial = kernels::filter_batch_serial(pairs, chain);
  for (int threads : {2, 3, 8}) {
    const auto parallel = kernels::filter_batch_parallel(pairs, chain, threads);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(parallel[i].action == serial[i].action);
      CHECK(parallel[i].reason == serial[i].reason);
      CHECK(parallel[i].pair == serial[i].pair);
      CHECK(parallel[i].trail.size() == serial[i].trail.size());
    }
  }
}
