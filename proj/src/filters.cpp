#include "bitext/filters.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "bitext/levenshtein.hpp"
#include "bitext/utf8.hpp"

namespace bitext::filters {

namespace {

constexpr std::array<const char*, 8> kFilterNames = {
    "empty", "fix_encoding", "normalize_punctuation", "regex_fix", "length", "charset", "case_symbol", "edit_distance"};

constexpr std::u32string_view kCommonPunct = U"–—‘’‚“”„…«»°§€£";
constexpr std::u32string_view kIcelandicLetters = U"áéíóúýþæöðÁÉÍÓÚÝÞÆÖÐ";

// Windows-1252 for bytes 0x80..0x9F; zero where the code page leaves the byte
// undefined (decoders then fall back to the C1 control).
constexpr std::array<char32_t, 32> kCp1252High = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0,      0x017D, 0,      0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};

std::string misdecode(std::string_view utf8_bytes, bool cp1252) {
  std::string out;
  for (char c : utf8_bytes) {
    const auto b = static_cast<unsigned char>(c);
    char32_t cp = b;
    if (cp1252 && b >= 0x80 && b <= 0x9F && kCp1252High[b - 0x80] != 0) cp = kCp1252High[b - 0x80];
    utf8::append(out, cp);
  }
  return out;
}

bool only_spaces(std::string_view text) { return utf8::trim(text).empty(); }

struct SideShape {
  std::array<int, 10> digits{};
  std::size_t symbols = 0;
  std::size_t upper = 0;
  std::size_t lower = 0;
};

bool is_counted_symbol(char32_t cp) {
  switch (cp) {
    case U'.': case U'!': case U'?': case U'(': case U')': case U'[': case U']':
    case U'{': case U'}': case U'"': case 0xAB: case 0xBB: case 0x201C: case 0x201D: case 0x201E:
      return true;
    default:
      return false;
  }
}

SideShape shape_of(std::string_view text) {
  SideShape s;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = utf8::next(text, i);
    if (utf8::is_ascii_digit(cp))
      ++s.digits[cp - U'0'];
    else if (is_counted_symbol(cp))
      ++s.symbols;
    else if (utf8::is_upper(cp))
      ++s.upper;
    else if (utf8::is_lower(cp))
      ++s.lower;
  }
  return s;
}

bool all_caps(const SideShape& s, std::size_t min_letters) { return s.lower == 0 && s.upper >= min_letters; }

double disallowed_fraction(std::string_view text, const Charset& allowed) {
  std::size_t total = 0, bad = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = utf8::next(text, i);
    ++total;
    if (!allowed.contains(cp)) ++bad;
  }
  return total == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(total);
}

// Replacement for one codepoint during punctuation normalization: a single
// codepoint, a short string, or nothing.
enum class PunctKind { same, remove, space, map, ellipsis };

PunctKind classify(char32_t cp, bool dashes, char32_t& mapped) {
  if (cp < 0x80) return utf8::is_space(cp) ? PunctKind::space : PunctKind::same;
  switch (cp) {
    case 0x2018: case 0x2019: case 0x201A: case 0x201B: case 0x2032:
      mapped = U'\'';
      return PunctKind::map;
    case 0x201C: case 0x201D: case 0x201E: case 0x201F: case 0x2033:
      mapped = U'"';
      return PunctKind::map;
    case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014: case 0x2015: case 0x2212:
      if (!dashes) return PunctKind::same;
      mapped = U'-';
      return PunctKind::map;
    case 0x2026:
      return PunctKind::ellipsis;
    case 0x200B: case 0x200C: case 0x200D: case 0x2060: case 0xFEFF: case 0x00AD:
      return PunctKind::remove;
    default:
      return utf8::is_space(cp) ? PunctKind::space : PunctKind::same;
  }
}

std::string decode_escapes(std::string_view field, const std::filesystem::path& path, std::size_t line_no) {
  std::string out;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '\\' || i + 1 == field.size()) {
      out.push_back(field[i]);
      continue;
    }
    const char e = field[++i];
    if (e == '\\') {
      out.push_back('\\');
    } else if (e == 't') {
      out.push_back('\t');
    } else if (e == 'u' && i + 4 < field.size()) {
      const std::string hex(field.substr(i + 1, 4));
      std::size_t used = 0;
      unsigned long cp = 0;
      try {
        cp = std::stoul(hex, &used, 16);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != 4) throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad \\u escape");
      utf8::append(out, static_cast<char32_t>(cp));
      i += 4;
    } else {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": unknown escape \\" + std::string(1, e));
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_tab_file(const std::filesystem::path& path, bool escapes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected pattern<TAB>replacement");
    std::string pattern = line.substr(0, tab);
    std::string replacement = line.substr(tab + 1);
    if (escapes) {
      pattern = decode_escapes(pattern, path, line_no);
      replacement = decode_escapes(replacement, path, line_no);
    }
    if (pattern.empty()) throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty pattern");
    if (!utf8::is_valid(pattern) || !utf8::is_valid(replacement))
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": invalid UTF-8");
    rows.emplace_back(std::move(pattern), std::move(replacement));
  }
  return rows;
}

std::size_t replace_all(std::string& text, std::string_view pattern, std::string_view replacement) {
  std::size_t count = 0;
  std::size_t pos = text.find(pattern);
  if (pos == std::string::npos) return 0;
  std::string out;
  out.reserve(text.size());
  std::size_t from = 0;
  while (pos != std::string::npos) {
    out.append(text, from, pos - from);
    out.append(replacement);
    from = pos + pattern.size();
    ++count;
    pos = text.find(pattern, from);
  }
  out.append(text, from, std::string::npos);
  text.swap(out);
  return count;
}

bool contains_lead(std::string_view text, const std::vector<char32_t>& leads) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b = static_cast<unsigned char>(text[i]);
    char32_t cp;
    if (b < 0x80) {
      cp = b;
      ++i;
    } else {
      cp = utf8::next(text, i);
    }
    if (std::find(leads.begin(), leads.end(), cp) != leads.end()) return true;
  }
  return false;
}

}  // namespace

const char* to_string(FilterId id) { return kFilterNames[static_cast<std::size_t>(id)]; }

FilterId parse_filter_id(std::string_view name) {
  for (std::size_t i = 0; i < kFilterNames.size(); ++i)
    if (name == kFilterNames[i]) return static_cast<FilterId>(i);
  throw ConfigError("unknown filter id '" + std::string(name) + "'");
}

const char* to_string(Action action) {
  switch (action) {
    case Action::keep: return "keep";
    case Action::drop: return "drop";
    case Action::fix: return "fix";
  }
  return "?";
}

void Charset::add_range(char32_t first, char32_t last) {
  if (last < first) std::swap(first, last);
  for (char32_t cp = first; cp <= last && cp < low_.size(); ++cp) low_.set(cp);
  ranges_.emplace_back(first, last);
  std::sort(ranges_.begin(), ranges_.end());
  std::vector<std::pair<char32_t, char32_t>> merged;
  for (const auto& r : ranges_) {
    if (!merged.empty() && r.first <= merged.back().second + 1)
      merged.back().second = std::max(merged.back().second, r.second);
    else
      merged.push_back(r);
  }
  ranges_.swap(merged);
}

void Charset::add_chars(std::u32string_view chars) {
  for (char32_t cp : chars) add_range(cp, cp);
}

bool Charset::contains(char32_t cp) const {
  if (cp < low_.size()) return low_.test(cp);
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), std::make_pair(cp, char32_t{0x10FFFF}));
  if (it == ranges_.begin()) return false;
  --it;
  return cp >= it->first && cp <= it->second;
}

Charset Charset::english() {
  Charset c;
  c.add_range(0x20, 0x7E);
  c.add_chars(kCommonPunct);
  return c;
}

Charset Charset::icelandic() {
  Charset c = english();
  c.add_chars(kIcelandicLetters);
  return c;
}

Charset Charset::for_language(std::string_view lang) {
  if (lang == "is") return icelandic();
  if (lang == "en") return english();
  throw ConfigError("no default character whitelist for language '" + std::string(lang) + "'");
}

MojibakeTable MojibakeTable::builtin() {
  MojibakeTable t;
  // Typographic punctuation first: these are three-codepoint sequences.
  for (char32_t cp : std::u32string_view(U"’‘“”–—…")) {
    std::string good;
    utf8::append(good, cp);
    for (bool cp1252 : {true, false}) {
      std::string bad = misdecode(good, cp1252);
      if (std::none_of(t.entries.begin(), t.entries.end(), [&](const auto& e) { return e.first == bad; }))
        t.entries.emplace_back(std::move(bad), good);
    }
  }
  for (char32_t cp : kIcelandicLetters) {
    std::string good;
    utf8::append(good, cp);
    for (bool cp1252 : {true, false}) {
      std::string bad = misdecode(good, cp1252);
      if (std::none_of(t.entries.begin(), t.entries.end(), [&](const auto& e) { return e.first == bad; }))
        t.entries.emplace_back(std::move(bad), good);
    }
  }
  t.finalize();
  return t;
}

MojibakeTable MojibakeTable::load(const std::filesystem::path& path) {
  MojibakeTable t;
  t.entries = read_tab_file(path, true);
  t.finalize();
  return t;
}

void MojibakeTable::finalize() {
  leads.clear();
  for (const auto& [pattern, replacement] : entries) {
    std::size_t i = 0;
    const char32_t cp = utf8::next(pattern, i);
    if (std::find(leads.begin(), leads.end(), cp) == leads.end()) leads.push_back(cp);
  }
}

RegexFix make_regex_fix(std::string pattern, std::string replacement) {
  if (replacement.find_first_of("\r\n") != std::string::npos)
    throw ConfigError("regex replacement may not contain a line break");
  try {
    std::regex re(pattern, std::regex::ECMAScript | std::regex::optimize);
    return RegexFix{std::move(pattern), std::move(replacement), std::move(re)};
  } catch (const std::regex_error& e) {
    throw ConfigError("bad regex '" + pattern + "': " + e.what());
  }
}

std::vector<RegexFix> load_regex_fixes(const std::filesystem::path& path) {
  std::vector<RegexFix> fixes;
  for (auto& [pattern, replacement] : read_tab_file(path, false))
    fixes.push_back(make_regex_fix(std::move(pattern), std::move(replacement)));
  return fixes;
}

void FilterConfig::validate() const {
  if (min_chars > max_chars) throw ConfigError("filters.min_chars must not exceed filters.max_chars");
  if (!(length_ratio_max >= 1.0)) throw ConfigError("filters.length_ratio_max must be >= 1");
  if (!(edit_distance_min_normalized >= 0.0 && edit_distance_min_normalized <= 1.0))
    throw ConfigError("filters.edit_distance_min_normalized must be in [0, 1]");
  if (!(charset_tolerance >= 0.0 && charset_tolerance <= 1.0))
    throw ConfigError("filters.charset_tolerance must be in [0, 1]");
  if (charset_source.empty()) throw ConfigError("filters.charset_source is empty");
  if (charset_target.empty()) throw ConfigError("filters.charset_target is empty");
}

FilterVerdict filter_empty(const SentencePair& pair) {
  if (only_spaces(pair.source)) return FilterVerdict::drop(FilterId::empty, "empty_source");
  if (only_spaces(pair.target)) return FilterVerdict::drop(FilterId::empty, "empty_target");
  return FilterVerdict::keep(FilterId::empty);
}

FilterVerdict filter_length(const SentencePair& pair, const FilterConfig& config) {
  constexpr auto id = FilterId::length;
  const std::size_t chars_s = utf8::length(pair.source);
  const std::size_t chars_t = utf8::length(pair.target);
  if (chars_s < config.min_chars) return FilterVerdict::drop(id, "too_short_source");
  if (chars_t < config.min_chars) return FilterVerdict::drop(id, "too_short_target");
  if (chars_s > config.max_chars) return FilterVerdict::drop(id, "too_long_source");
  if (chars_t > config.max_chars) return FilterVerdict::drop(id, "too_long_target");
  const std::size_t tok_s = utf8::count_words(pair.source);
  const std::size_t tok_t = utf8::count_words(pair.target);
  if (tok_s > config.max_tokens) return FilterVerdict::drop(id, "too_many_tokens_source");
  if (tok_t > config.max_tokens) return FilterVerdict::drop(id, "too_many_tokens_target");
  const std::size_t lo = std::min(tok_s, tok_t);
  const std::size_t hi = std::max(tok_s, tok_t);
  // Whitespace-only sides have no tokens; filter_empty owns that case.
  if (lo > 0 && static_cast<double>(hi) > config.length_ratio_max * static_cast<double>(lo))
    return FilterVerdict::drop(id, "length_ratio");
  return FilterVerdict::keep(id);
}

FilterVerdict filter_charset(const SentencePair& pair, const FilterConfig& config) {
  if (disallowed_fraction(pair.source, config.charset_source) > config.charset_tolerance)
    return FilterVerdict::drop(FilterId::charset, "charset_source");
  if (disallowed_fraction(pair.target, config.charset_target) > config.charset_tolerance)
    return FilterVerdict::drop(FilterId::charset, "charset_target");
  return FilterVerdict::keep(FilterId::charset);
}

FilterVerdict filter_case_symbol_mismatch(const SentencePair& pair, const FilterConfig& config) {
  constexpr auto id = FilterId::case_symbol;
  const SideShape s = shape_of(pair.source);
  const SideShape t = shape_of(pair.target);
  if (s.digits != t.digits) return FilterVerdict::drop(id, "digit_mismatch");
  const std::size_t diff = s.symbols > t.symbols ? s.symbols - t.symbols : t.symbols - s.symbols;
  if (diff > config.symbol_slack) return FilterVerdict::drop(id, "symbol_mismatch");
  if (all_caps(s, config.all_caps_min_letters) != all_caps(t, config.all_caps_min_letters))
    return FilterVerdict::drop(id, "case_mismatch");
  return FilterVerdict::keep(id);
}

double normalized_edit_distance(std::string_view a, std::string_view b) {
  const std::u32string ua = utf8::decode(a);
  const std::u32string ub = utf8::decode(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
}

FilterVerdict filter_edit_distance(const SentencePair& pair, const FilterConfig& config) {
  constexpr auto id = FilterId::edit_distance;
  const std::u32string a = utf8::decode(pair.source);
  const std::u32string b = utf8::decode(pair.target);
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return FilterVerdict::keep(id);
  const double threshold = config.edit_distance_min_normalized * static_cast<double>(longest);
  // The length difference is a lower bound on the distance.
  const std::size_t gap = longest - std::min(a.size(), b.size());
  if (static_cast<double>(gap) >= threshold) return FilterVerdict::keep(id);
  if (static_cast<double>(levenshtein(a, b)) < threshold) return FilterVerdict::drop(id, "near_copy");
  return FilterVerdict::keep(id);
}

std::string normalize_punctuation(std::string_view text, bool dashes) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = utf8::next(text, i);
    char32_t mapped = cp;
    const PunctKind kind = classify(cp, dashes, mapped);
    if (kind == PunctKind::remove) continue;
    if (kind == PunctKind::space) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    if (kind == PunctKind::ellipsis)
      out += "...";
    else
      utf8::append(out, mapped);
  }
  return out;
}

FilterVerdict filter_normalize_punctuation(const SentencePair& pair, const FilterConfig& config) {
  constexpr auto id = FilterId::normalize_punctuation;
  std::string s = normalize_punctuation(pair.source, config.normalize_dashes);
  std::string t = normalize_punctuation(pair.target, config.normalize_dashes);
  if (s == pair.source && t == pair.target) return FilterVerdict::keep(id);
  return FilterVerdict::fix(id, std::move(s), std::move(t));
}

EncodingFix fix_encoding(std::string_view text, const MojibakeTable& table) {
  EncodingFix result;
  result.text.assign(text);
  if (!table.entries.empty() && contains_lead(text, table.leads)) {
    // Repeat until stable so that nested damage is undone and a second call is a no-op.
    for (int pass = 0; pass < 8; ++pass) {
      std::size_t changes = 0;
      for (const auto& [pattern, replacement] : table.entries) changes += replace_all(result.text, pattern, replacement);
      if (changes == 0) break;
      result.status = EncodingFix::Status::fixed;
    }
  }
  if (result.text.find("\xEF\xBF\xBD") != std::string::npos) result.status = EncodingFix::Status::unresolved;
  return result;
}

FilterVerdict filter_fix_encoding(const SentencePair& pair, const FilterConfig& config) {
  constexpr auto id = FilterId::fix_encoding;
  EncodingFix s = fix_encoding(pair.source, config.mojibake_table);
  if (s.status == EncodingFix::Status::unresolved) return FilterVerdict::drop(id, "encoding_source");
  EncodingFix t = fix_encoding(pair.target, config.mojibake_table);
  if (t.status == EncodingFix::Status::unresolved) return FilterVerdict::drop(id, "encoding_target");
  if (s.status == EncodingFix::Status::clean && t.status == EncodingFix::Status::clean) return FilterVerdict::keep(id);
  return FilterVerdict::fix(id, std::move(s.text), std::move(t.text));
}

FilterVerdict filter_regex_fix(const SentencePair& pair, const FilterConfig& config) {
  constexpr auto id = FilterId::regex_fix;
  if (config.regex_fixes.empty()) return FilterVerdict::keep(id);
  std::string s = pair.source;
  std::string t = pair.target;
  for (const auto& fix : config.regex_fixes) {
    s = std::regex_replace(s, fix.re, fix.replacement);
    t = std::regex_replace(t, fix.re, fix.replacement);
  }
  if (s == pair.source && t == pair.target) return FilterVerdict::keep(id);
  return FilterVerdict::fix(id, std::move(s), std::move(t));
}

std::vector<FilterId> default_chain() {
  // The leading empty check short-circuits blank lines before any rewriting;
  // the second one catches sides that the fixes reduced to nothing.
  return {FilterId::empty,  FilterId::fix_encoding, FilterId::normalize_punctuation, FilterId::empty,
          FilterId::length, FilterId::charset,      FilterId::case_symbol,           FilterId::edit_distance};
}

FilterChain::FilterChain(FilterConfig config, std::vector<FilterId> order)
    : config_(std::move(config)), order_(std::move(order)) {
  if (order_.empty()) throw ConfigError("filter chain is empty");
  config_.validate();
}

FilterVerdict FilterChain::run(FilterId id, const SentencePair& pair) const {
  switch (id) {
    case FilterId::empty: return filter_empty(pair);
    case FilterId::fix_encoding: return filter_fix_encoding(pair, config_);
    case FilterId::normalize_punctuation: return filter_normalize_punctuation(pair, config_);
    case FilterId::regex_fix: return filter_regex_fix(pair, config_);
    case FilterId::length: return filter_length(pair, config_);
    case FilterId::charset: return filter_charset(pair, config_);
    case FilterId::case_symbol: return filter_case_symbol_mismatch(pair, config_);
    case FilterId::edit_distance: return filter_edit_distance(pair, config_);
  }
  throw ConfigError("unknown filter id");
}

ChainResult FilterChain::apply(const SentencePair& pair) const {
  ChainResult result;
  result.pair = pair;
  result.trail.reserve(order_.size());
  for (FilterId id : order_) {
    FilterVerdict v = run(id, result.pair);
    if (v.action == Action::fix) {
      result.pair.source = v.new_source;
      result.pair.target = v.new_target;
      result.action = Action::fix;
    } else if (v.action == Action::drop) {
      result.action = Action::drop;
      result.decided_by = id;
      result.reason = v.reason;
      result.trail.push_back(std::move(v));
      return result;
    }
    result.trail.push_back(std::move(v));
  }
  return result;
}

ChainResult apply_filter_chain(const SentencePair& pair, const std::vector<FilterId>& order, const FilterConfig& config) {
  return FilterChain(config, order).apply(pair);
}

}  // namespace bitext::filters
