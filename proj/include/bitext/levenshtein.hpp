#pragma once

#include <cstddef>
#include <string_view>

namespace bitext {

// Unit-cost edit distance over codepoints (insert, delete, substitute).
//
// Uses the bit-vector recurrence of Myers/Hyyrö: one pass over the longer
// string, ceil(m / 64) machine words per step for the shorter one.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

}  // namespace bitext
