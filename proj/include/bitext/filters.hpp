#pragma once

// Heuristic bitext filters. Every filter looks at one sentence pair and
// returns a verdict: keep it, drop it (with a reason code), or keep a
// rewritten version. Filters are composed into an ordered chain.

#include <bitset>
#include <cstddef>
#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bitext/types.hpp"

namespace bitext::filters {

enum class FilterId { empty, fix_encoding, normalize_punctuation, regex_fix, length, charset, case_symbol, edit_distance };

const char* to_string(FilterId id);
// Throws ConfigError ("unknown filter id") for names outside FilterId.
FilterId parse_filter_id(std::string_view name);

enum class Action { keep, drop, fix };
const char* to_string(Action action);

struct FilterVerdict {
  FilterId filter = FilterId::empty;
  Action action = Action::keep;
  std::string reason;  // set for drops, e.g. "empty_source"
  std::string new_source;
  std::string new_target;

  static FilterVerdict keep(FilterId id) { return {id, Action::keep, {}, {}, {}}; }
  static FilterVerdict drop(FilterId id, std::string reason) { return {id, Action::drop, std::move(reason), {}, {}}; }
  static FilterVerdict fix(FilterId id, std::string src, std::string tgt) {
    return {id, Action::fix, {}, std::move(src), std::move(tgt)};
  }
};

// A set of allowed codepoints.
class Charset {
 public:
  Charset() = default;
  void add_range(char32_t first, char32_t last);
  void add_chars(std::u32string_view chars);
  bool contains(char32_t cp) const;
  bool empty() const { return ranges_.empty(); }

  // "0020-007E" style ranges (hex codepoints) for config round trips.
  const std::vector<std::pair<char32_t, char32_t>>& ranges() const { return ranges_; }

  // Printable basic Latin plus common typographic punctuation.
  static Charset english();
  // english() plus the Icelandic letters áéíóúýþæöð in both cases.
  static Charset icelandic();
  static Charset for_language(std::string_view lang);

 private:
  std::bitset<0x800> low_;  // fast path for codepoints below U+0800
  std::vector<std::pair<char32_t, char32_t>> ranges_;
};

// Ordered (pattern -> replacement) substitutions for mis-decoded text.
struct MojibakeTable {
  std::vector<std::pair<std::string, std::string>> entries;

  // UTF-8 Icelandic letters and common punctuation read as Latin-1 or
  // Windows-1252, mapped back.
  static MojibakeTable builtin();
  // One `pattern<TAB>replacement` per line; `\uXXXX`, `\t` and `\\` escapes
  // are decoded; blank lines and lines starting with '#' are skipped.
  static MojibakeTable load(const std::filesystem::path& path);
  void finalize();

  std::vector<char32_t> leads;  // first codepoint of each entry, deduplicated
};

struct RegexFix {
  std::string pattern;
  std::string replacement;
  std::regex re;
};

// One `regex<TAB>replacement` per line (ECMAScript syntax, `$1` references).
std::vector<RegexFix> load_regex_fixes(const std::filesystem::path& path);
RegexFix make_regex_fix(std::string pattern, std::string replacement);

struct FilterConfig {
  std::size_t min_chars = 1;
  std::size_t max_chars = 1000;
  std::size_t max_tokens = 250;
  double length_ratio_max = 9.0;
  Charset charset_source = Charset::english();
  Charset charset_target = Charset::icelandic();
  double charset_tolerance = 0.0;  // allowed fraction of non-whitelisted codepoints
  double edit_distance_min_normalized = 0.3;
  std::size_t symbol_slack = 2;
  std::size_t all_caps_min_letters = 4;
  bool normalize_dashes = true;
  MojibakeTable mojibake_table = MojibakeTable::builtin();
  std::vector<RegexFix> regex_fixes;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

FilterVerdict filter_empty(const SentencePair& pair);
FilterVerdict filter_length(const SentencePair& pair, const FilterConfig& config);
FilterVerdict filter_charset(const SentencePair& pair, const FilterConfig& config);
FilterVerdict filter_case_symbol_mismatch(const SentencePair& pair, const FilterConfig& config);
FilterVerdict filter_edit_distance(const SentencePair& pair, const FilterConfig& config);
FilterVerdict filter_normalize_punctuation(const SentencePair& pair, const FilterConfig& config);
FilterVerdict filter_fix_encoding(const SentencePair& pair, const FilterConfig& config);
FilterVerdict filter_regex_fix(const SentencePair& pair, const FilterConfig& config);

// Canonical punctuation: straight quotes, hyphen-minus for dashes (when
// `dashes` is set), "..." for the ellipsis character, plain spaces, no
// zero-width characters, single spaces, trimmed. Idempotent.
std::string normalize_punctuation(std::string_view text, bool dashes = true);

struct EncodingFix {
  enum class Status { clean, fixed, unresolved };
  Status status = Status::clean;
  std::string text;
};

// Applies the table until nothing changes; unresolved if U+FFFD remains.
EncodingFix fix_encoding(std::string_view text, const MojibakeTable& table);

// Normalized edit distance d / max(|a|, |b|) in codepoints; 0 for two empty strings.
double normalized_edit_distance(std::string_view a, std::string_view b);

std::vector<FilterId> default_chain();

struct ChainResult {
  Action action = Action::keep;  // keep, drop, or fix when any filter rewrote the pair
  FilterId decided_by = FilterId::empty;
  std::string reason;
  SentencePair pair;  // the pair after all fixes
  std::vector<FilterVerdict> trail;

  bool kept() const { return action != Action::drop; }
};

class FilterChain {
 public:
  FilterChain(FilterConfig config, std::vector<FilterId> order);

  // Runs filters in order; fixes feed later filters; the first drop stops the chain.
  ChainResult apply(const SentencePair& pair) const;

  const FilterConfig& config() const { return config_; }
  const std::vector<FilterId>& order() const { return order_; }

 private:
  FilterVerdict run(FilterId id, const SentencePair& pair) const;

  FilterConfig config_;
  std::vector<FilterId> order_;
};

ChainResult apply_filter_chain(const SentencePair& pair, const std::vector<FilterId>& order, const FilterConfig& config);

}  // namespace bitext::filters
