#pragma once

// Corpus BLEU compatible with sacreBLEU 1.5.1 under
// case.mixed + numrefs.1 + smooth.exp + tok.13a.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bitext/types.hpp"

namespace bitext::bleu {

inline constexpr int kMaxOrder = 4;
inline constexpr const char* kCompatVersion = "1.5.1";

class LengthMismatch : public DataError {
 public:
  using DataError::DataError;
};
class EmptyCorpus : public DataError {
 public:
  using DataError::DataError;
};
class EmptyReference : public DataError {
 public:
  using DataError::DataError;
};

// mteval-v13a tokenization: unescape a few entities, split off punctuation
// (keeping '.' and ',' inside numbers and '-' after non-digits), split on whitespace.
std::vector<std::string> tokenize_13a(std::string_view text);

// Sufficient statistics; these add up across sentences.
struct Stats {
  std::array<std::size_t, kMaxOrder> matches{};
  std::array<std::size_t, kMaxOrder> totals{};
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;

  Stats& operator+=(const Stats& other);
  friend bool operator==(const Stats&, const Stats&) = default;
};

Stats sentence_stats(std::string_view hypothesis, std::string_view reference);

struct BleuScore {
  double score = 0.0;                      // [0, 100]
  std::array<double, kMaxOrder> precisions{};  // [0, 1]
  double brevity_penalty = 0.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;
  Stats stats;
};

BleuScore score_from_stats(const Stats& stats);

// Throws LengthMismatch, EmptyCorpus, or EmptyReference.
BleuScore corpus_bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references);

// "BLEU+case.mixed+lang.en-is+numrefs.1+smooth.exp+tok.13a+version.1.5.1";
// the lang field is left out when `lang_pair` is empty.
std::string signature(std::string_view lang_pair = {});

}  // namespace bitext::bleu
