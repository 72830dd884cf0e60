#include "golden.hpp"

#include <array>
#include <random>

namespace testing {

namespace {

constexpr std::array<const char*, 24> kEnglish = {
    "the", "weather", "house", "river", "mountain", "people", "ship", "harbour", "winter", "summer", "children", "book",
    "road", "village", "fish", "sheep", "evening", "morning", "light", "wind", "sea", "snow", "friends", "garden"};
constexpr std::array<const char*, 24> kIcelandic = {
    "veðrið", "húsið", "áin", "fjallið", "fólkið", "skipið", "höfnin", "vetur", "sumar", "börnin", "bókin", "vegurinn",
    "þorpið", "fiskur", "kindur", "kvöld", "morgunn", "ljós", "vindur", "hafið", "snjór", "vinir", "garðurinn", "þúfa"};

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

template <std::size_t N>
std::string sentence(std::mt19937_64& rng, const std::array<const char*, N>& words, std::size_t len) {
  std::string s;
  for (std::size_t i = 0; i < len; ++i) {
    std::string w = words[rng() % N];
    if (i == 0) w = capitalize(w);
    if (i) s.push_back(' ');
    s += w;
  }
  return s + ".";
}

}  // namespace

bitext::SentencePair clean_pair(std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(seed * 1000003 + index);
  bitext::SentencePair p;
  p.source = sentence(rng, kEnglish, 3 + rng() % 10);
  p.target = sentence(rng, kIcelandic, 3 + rng() % 10);
  p.line_no = index + 1;
  return p;
}

std::string latin1_misdecode(const std::string& utf8_text) {
  std::string out;
  for (unsigned char b : utf8_text) {
    if (b < 0x80) {
      out.push_back(static_cast<char>(b));
    } else {
      out.push_back(static_cast<char>(0xC0 | (b >> 6)));
      out.push_back(static_cast<char>(0x80 | (b & 0x3F)));
    }
  }
  return out;
}

std::vector<GoldenLine> golden_corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GoldenLine> lines;
  lines.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    GoldenLine g;
    g.input = clean_pair(seed, i);
    g.expected = g.input;
    g.defect = "clean";
    auto drop = [&](const char* defect, const char* filter, const char* reason) {
      g.defect = defect;
      g.keep = false;
      g.filter = filter;
      g.reason = reason;
    };
    switch (rng() % 20) {
      case 0:
        g.input.source = (rng() % 2) ? "" : "   ";
        drop("empty_source", "empty", "empty_source");
        break;
      case 1:
        g.input.target = "";
        drop("empty_target", "empty", "empty_target");
        break;
      case 2:
        // fixable: damaged on the way in, restored by the table
        g.input.target = latin1_misdecode(g.input.target);
        g.defect = g.input.target == g.expected.target ? "clean" : "mojibake";
        break;
      case 3:
        g.input.target.insert(g.input.target.size() - 1, " \xEF\xBF\xBD");
        drop("unresolvable_encoding", "fix_encoding", "encoding_target");
        break;
      case 4:
        g.input.target.insert(g.input.target.size() - 1, " 漢字");
        drop("charset_target", "charset", "charset_target");
        break;
      case 5:
        g.input.source = "Þórður " + g.input.source;
        drop("charset_source", "charset", "charset_source");
        break;
      case 6: {
        g.input.source = "Yes.";
        std::string t;
        for (int k = 0; k < 10; ++k) t += kIcelandic[rng() % kIcelandic.size()] + std::string(" ");
        g.input.target = "Já " + t + "já.";
        drop("length_ratio", "length", "length_ratio");
        break;
      }
      case 7:
        g.input.source.insert(g.input.source.size() - 1, " 42");
        g.input.target.insert(g.input.target.size() - 1, " 24" + std::to_string(rng() % 10));
        drop("digit_mismatch", "case_symbol", "digit_mismatch");
        break;
      case 8:
        g.input.target = g.input.source;
        g.input.target.insert(g.input.target.size() - 1, "!");
        drop("near_copy", "edit_distance", "near_copy");
        break;
      case 9:
        g.input.source = "“" + g.input.source + "”";
        g.input.target = "„" + g.input.target + "“";
        g.expected.source = "\"" + g.expected.source + "\"";
        g.expected.target = "\"" + g.expected.target + "\"";
        g.defect = "typographic_quotes";
        break;
      default:
        break;
    }
    lines.push_back(std::move(g));
  }
  return lines;
}

}  // namespace testing
