#include "bitext/bleu.hpp"

#include <cmath>
#include <string_view>
#include <unordered_map>

#include "bitext/utf8.hpp"

namespace bitext::bleu {
namespace {

void replace_all(std::string& text, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// [{-~[-` -&(-+:-@/]
bool is_split_symbol(char32_t c) {
  return (c >= 0x7B && c <= 0x7E) || (c >= 0x5B && c <= 0x60) || (c >= 0x20 && c <= 0x26) ||
         (c >= 0x28 && c <= 0x2B) || (c >= 0x3A && c <= 0x40) || c == 0x2F;
}

bool is_period_comma(char32_t c) { return c == U'.' || c == U','; }

// Python's str.rstrip() with no argument.
std::string_view rstrip(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0) {
    std::size_t start = end - 1;
    while (start > 0 && (static_cast<unsigned char>(text[start]) & 0xC0) == 0x80) --start;
    std::size_t p = start;
    if (!utf8::is_space(utf8::next(text, p))) break;
    end = start;
  }
  return text.substr(0, end);
}

// The four regex substitutions below run left to right with non-overlapping
// matches, exactly like re.sub over codepoints.
std::u32string pad_symbols(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size() * 2);
  for (char32_t c : s) {
    if (is_split_symbol(c)) {
      out.push_back(U' ');
      out.push_back(c);
      out.push_back(U' ');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

// ([^0-9])([\.,]) -> "\1 \2 "
std::u32string split_after_nondigit(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size() * 2);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && !utf8::is_ascii_digit(s[i]) && is_period_comma(s[i + 1])) {
      out.push_back(s[i]);
      out.push_back(U' ');
      out.push_back(s[i + 1]);
      out.push_back(U' ');
      i += 2;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// ([\.,])([^0-9]) -> " \1 \2"
std::u32string split_before_nondigit(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size() * 2);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && is_period_comma(s[i]) && !utf8::is_ascii_digit(s[i + 1])) {
      out.push_back(U' ');
      out.push_back(s[i]);
      out.push_back(U' ');
      out.push_back(s[i + 1]);
      i += 2;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// ([0-9])(-) -> "\1 \2 "
std::u32string split_dash_after_digit(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size() * 2);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && utf8::is_ascii_digit(s[i]) && s[i + 1] == U'-') {
      out.push_back(s[i]);
      out.push_back(U' ');
      out.push_back(U'-');
      out.push_back(U' ');
      i += 2;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens) {
  NgramCounts counts;
  counts.reserve(tokens.size() * kMaxOrder);
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    key.clear();
    for (int n = 1; n <= kMaxOrder && i + n <= tokens.size(); ++n) {
      if (n > 1) key.push_back(' ');
      key += tokens[i + n - 1];
      ++counts[key];
    }
  }
  return counts;
}

std::size_t order_of(const std::string& ngram) {
  std::size_t n = 1;
  for (char c : ngram) n += c == ' ';
  return n;
}

// log with the reference scorer's floor for zero.
double floored_log(double x) { return x > 0.0 ? std::log(x) : -9999999999.0; }

}  // namespace

std::vector<std::string> tokenize_13a(std::string_view text) {
  std::string line(rstrip(text));
  replace_all(line, "<skipped>", "");
  replace_all(line, "-\n", "");
  replace_all(line, "\n", " ");
  replace_all(line, "&quot;", "\"");
  replace_all(line, "&amp;", "&");
  replace_all(line, "&lt;", "<");
  replace_all(line, "&gt;", ">");
  std::u32string s = U" " + utf8::decode(line) + U" ";
  s = pad_symbols(s);
  s = split_after_nondigit(s);
  s = split_before_nondigit(s);
  s = split_dash_after_digit(s);

  std::vector<std::string> tokens;
  std::string current;
  for (char32_t c : s) {
    if (utf8::is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      utf8::append(current, c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Stats& Stats::operator+=(const Stats& other) {
  for (int n = 0; n < kMaxOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

Stats sentence_stats(std::string_view hypothesis, std::string_view reference) {
  const auto hyp = tokenize_13a(hypothesis);
  const auto ref = tokenize_13a(reference);
  Stats st;
  st.hyp_length = hyp.size();
  st.ref_length = ref.size();
  const NgramCounts hyp_counts = count_ngrams(hyp);
  const NgramCounts ref_counts = count_ngrams(ref);
  for (const auto& [ngram, count] : hyp_counts) {
    const std::size_t n = order_of(ngram) - 1;
    st.totals[n] += count;
    auto it = ref_counts.find(ngram);
    if (it != ref_counts.end()) st.matches[n] += std::min(count, it->second);
  }
  return st;
}

BleuScore score_from_stats(const Stats& stats) {
  BleuScore out;
  out.stats = stats;
  out.hyp_length = stats.hyp_length;
  out.ref_length = stats.ref_length;

  // Exponential smoothing: the k-th order with no matches gets 1 / (2^k * total).
  double smooth = 1.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    if (stats.totals[n] == 0) break;
    if (stats.matches[n] == 0) {
      smooth *= 2.0;
      out.precisions[n] = 1.0 / (smooth * static_cast<double>(stats.totals[n]));
    } else {
      out.precisions[n] = static_cast<double>(stats.matches[n]) / static_cast<double>(stats.totals[n]);
    }
  }

  if (stats.hyp_length < stats.ref_length)
    out.brevity_penalty = stats.hyp_length > 0
                              ? std::exp(1.0 - static_cast<double>(stats.ref_length) / static_cast<double>(stats.hyp_length))
                              : 0.0;
  else
    out.brevity_penalty = 1.0;

  double log_sum = 0.0;
  for (double p : out.precisions) log_sum += floored_log(p);
  out.score = 100.0 * out.brevity_penalty * std::exp(log_sum / kMaxOrder);
  return out;
}

BleuScore corpus_bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size())
    throw LengthMismatch("hypotheses (" + std::to_string(hypotheses.size()) + ") and references (" +
                         std::to_string(references.size()) + ") differ in length");
  if (hypotheses.empty()) throw EmptyCorpus("no sentences to score");
  Stats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    if (references[i].empty()) throw EmptyReference("reference " + std::to_string(i + 1) + " is empty");
    total += sentence_stats(hypotheses[i], references[i]);
  }
  return score_from_stats(total);
}

std::string signature(std::string_view lang_pair) {
  std::string sig = "BLEU+case.mixed+";
  if (!lang_pair.empty()) sig += "lang." + std::string(lang_pair) + "+";
  sig += "numrefs.1+smooth.exp+tok.13a+version.";
  sig += kCompatVersion;
  return sig;
}

}  // namespace bitext::bleu
