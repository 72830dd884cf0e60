#pragma once

// Seeded word-level noise for backtranslated sentences: word dropout,
// whole-word masking and local permutation within a window of k words.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bitext/rng.hpp"
#include "bitext/types.hpp"

namespace bitext::noising {

enum class NoiseOp { drop, mask, permute };

const char* to_string(NoiseOp op);
NoiseOp parse_noise_op(std::string_view name);

struct NoiseConfig {
  std::size_t k = 3;
  double p_mask = 0.1;
  double p_drop = 0.1;
  std::string mask_token = "<mask>";
  std::uint64_t seed = 0;
  std::vector<NoiseOp> order = {NoiseOp::drop, NoiseOp::mask, NoiseOp::permute};

  void validate() const;
};

class EmptyInput : public DataError {
 public:
  using DataError::DataError;
};

using Words = std::vector<std::string>;

// Scores q_i = i + u_i with u_i ~ U[0, k) and stable-sorts by score, so no
// word moves more than k - 1 positions.
Words permute_within_k(Words words, std::size_t k, Rng& rng);
Words mask_words(Words words, double p_mask, std::string_view mask_token, Rng& rng);
// Never returns an empty list for non-empty input: if every word drew a drop,
// one uniformly chosen word survives.
Words drop_words(Words words, double p_drop, Rng& rng);

// Splits on whitespace, applies the configured ops with the stream for
// (config.seed, ordinal), and joins with single spaces.
std::string noise_sentence(std::string_view text, const NoiseConfig& config, std::uint64_t ordinal);

}  // namespace bitext::noising
