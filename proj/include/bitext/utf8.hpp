#pragma once

// UTF-8 helpers shared by every stage. Text is kept as UTF-8 std::string
// throughout; code that needs codepoints decodes on demand.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bitext::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Result of scrubbing a byte string into valid UTF-8.
struct Repaired {
  std::string text;
  std::size_t replaced = 0;  // number of U+FFFD substitutions made
};

bool is_valid(std::string_view bytes);

// Replaces each maximal invalid subsequence with U+FFFD.
Repaired repair(std::string_view bytes);

// Decodes valid UTF-8. Behaviour on invalid input: each bad byte becomes U+FFFD.
std::u32string decode(std::string_view text);
void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view cps);

// Decodes one codepoint starting at text[pos] and advances pos.
char32_t next(std::string_view text, std::size_t& pos);

std::size_t length(std::string_view text);

// Whitespace as understood by Python's str.isspace(); the BLEU tokenizer
// depends on the exact set.
bool is_space(char32_t cp);
inline bool is_ascii_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

// Simple (one-to-one) case mapping covering Latin, Greek and Cyrillic.
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split_words(std::string_view text);
std::size_t count_words(std::string_view text);

}  // namespace bitext::utf8
