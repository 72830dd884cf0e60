#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "bitext/utf8.hpp"
#include "support.hpp"

using namespace bitext;

namespace {

std::string unhex(const std::string& hex) {
  std::string out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) out.push_back(static_cast<char>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  return out;
}

}  // namespace

TEST_CASE("repair follows the maximal-subpart rule") {
  const auto r = utf8::repair("a\xF1\x80\x80\xE1\x80\xC2" "b\x80" "c\x80\xBF" "d");
  CHECK(r.replaced == 6);
  CHECK(r.text == "a���b�c��d");
  CHECK(utf8::repair("\xED\xA0\x80").replaced == 3);  // surrogate
  CHECK(utf8::repair("\xC0\xAF").replaced == 2);      // overlong
  CHECK(utf8::repair("\xF4\x90\x80\x80").replaced == 4);
  CHECK(utf8::repair("\xE2\x82").replaced == 1);      // truncated
  CHECK(utf8::repair("Þór").replaced == 0);
  CHECK(utf8::repair("Þór").text == "Þór");
}

TEST_CASE("repair agrees with Python on random byte strings") {
  std::ifstream in(testing::data_path("utf8_fixture.json"));
  REQUIRE(in);
  const auto fixture = nlohmann::json::parse(in);
  REQUIRE(fixture["cases"].size() >= 500);
  for (const auto& c : fixture["cases"]) {
    const std::string bytes = unhex(c["bytes"]);
    const auto r = utf8::repair(bytes);
    INFO(c["bytes"].get<std::string>());
    CHECK(r.text == unhex(c["repaired"]));
    CHECK(r.replaced == c["replaced"].get<std::size_t>());
    CHECK(utf8::is_valid(bytes) == c["valid"].get<bool>());
    CHECK(utf8::is_valid(r.text));
  }
}

TEST_CASE("encode and decode round trip") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    std::u32string cps;
    for (int j = 0; j < 20; ++j) {
      char32_t cp;
      do cp = static_cast<char32_t>(rng() % 0x110000);
      while (cp >= 0xD800 && cp <= 0xDFFF);
      cps.push_back(cp);
    }
    const std::string s = utf8::encode(cps);
    REQUIRE(utf8::is_valid(s));
    REQUIRE(utf8::decode(s) == cps);
    REQUIRE(utf8::length(s) == cps.size());
  }
}

TEST_CASE("whitespace set matches str.isspace") {
  const std::set<char32_t> expected = {0x9,  0xa,    0xb,    0xc,    0xd,    0x1c,   0x1d,   0x1e,   0x1f,
                                       0x20, 0x85,   0xa0,   0x1680, 0x2000, 0x2001, 0x2002, 0x2003, 0x2004,
                                       0x2005, 0x2006, 0x2007, 0x2008, 0x2009, 0x200a, 0x2028, 0x2029, 0x202f,
                                       0x205f, 0x3000};
  for (char32_t cp = 0; cp < 0x110000; ++cp) REQUIRE(utf8::is_space(cp) == expected.count(cp) > 0);
}

TEST_CASE("case mapping covers Icelandic") {
  CHECK(utf8::to_lower("ÞÓRÐUR ÆGIR ÖRN ÝMIR ÉG ÁÍÚ") == "þórður ægir örn ýmir ég áíú");
  CHECK(utf8::is_upper(U'Ð'));
  CHECK(utf8::is_lower(U'ð'));
  CHECK(utf8::to_lower(U'Σ') == U'σ');
  CHECK(utf8::to_lower(U'Ж') == U'ж');
  CHECK(utf8::to_lower(U'7') == U'7');
}

TEST_CASE("word splitting") {
  CHECK(utf8::count_words("  a\tb c 　 d ") == 4);
  CHECK(utf8::count_words("") == 0);
  const auto w = utf8::split_words(" Þetta  er\tpróf ");
  REQUIRE(w.size() == 3);
  CHECK(w[0] == "Þetta");
  CHECK(w[2] == "próf");
  CHECK(utf8::trim("  x y \t") == "x y");
}
