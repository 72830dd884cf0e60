#pragma once

// Training-corpus construction: tagging synthetic pairs and mixing authentic
// with synthetic data at a target ratio.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bitext/corpus_io.hpp"
#include "bitext/types.hpp"

namespace bitext::augment {

class AlreadyTagged : public DataError {
 public:
  using DataError::DataError;
};
class OriginMismatch : public DataError {
 public:
  using DataError::DataError;
};
class TagCollision : public DataError {
 public:
  using DataError::DataError;
};
class EmptyBothInputs : public DataError {
 public:
  using DataError::DataError;
};

struct TagSpec {
  std::string tag_token = "<bt>";
  void validate() const;
};

// Prefixes the source with the tag token. Throws OriginMismatch for authentic
// pairs, AlreadyTagged if the tag is already recorded, and TagCollision if
// the token already occurs as a word in either side.
SentencePair tag_synthetic(SentencePair pair, const TagSpec& spec);
// Inverse of tag_synthetic for pairs it produced.
SentencePair untag(SentencePair pair, const TagSpec& spec);

enum class MixMode { upsample_authentic, downsample_synthetic };
const char* to_string(MixMode mode);
MixMode parse_mix_mode(std::string_view name);

struct MixSpec {
  std::uint64_t ratio_authentic = 1;
  std::uint64_t ratio_synthetic = 2;
  MixMode mode = MixMode::upsample_authentic;
  std::uint64_t shuffle_seed = 0;

  void validate() const;
};

// "a:s" with both parts positive integers.
MixSpec parse_ratio(std::string_view text);

// One output slot: which input and which line of it.
struct MixEntry {
  bool synthetic = false;
  std::uint32_t index = 0;

  friend bool operator==(const MixEntry&, const MixEntry&) = default;
};

struct MixPlan {
  std::vector<MixEntry> entries;     // shuffled emission order
  std::vector<std::uint32_t> copies; // per authentic pair
  std::size_t authentic_out = 0;
  std::size_t synthetic_out = 0;
  double base_copies = 0.0;          // r = target authentic / |authentic|
  bool ratio_reachable = true;       // false when the mode cannot hit a:s exactly
};

// Plans a mix of `n_authentic` and `n_synthetic` pairs. Works on indices only,
// so the corpora themselves need not be in memory.
//
// upsample_authentic: the authentic target is T = round(n_synthetic * a / s);
// with r = floor(T / n_authentic), every authentic pair is emitted r or r + 1
// times (the T mod n_authentic extra copies go to seeded picks). When
// T < n_authentic the ratio cannot be reached without discarding authentic
// data; each authentic pair is then kept once and `ratio_reachable` is false.
//
// downsample_synthetic: all authentic pairs are kept once and a seeded subset
// of round(n_authentic * s / a) synthetic pairs is selected.
MixPlan plan_mix(std::size_t n_authentic, std::size_t n_synthetic, const MixSpec& spec);

std::vector<SentencePair> mix_corpora(const std::vector<SentencePair>& authentic,
                                      const std::vector<SentencePair>& synthetic, const MixSpec& spec);

struct MixFileStats {
  std::size_t authentic_in = 0;
  std::size_t synthetic_in = 0;
  MixPlan plan;
  CorpusStats written;
};

// File-backed mix: indexes line offsets, then streams pairs in plan order.
// Synthetic pairs are tagged on the way out when `tag` is set.
MixFileStats mix_files(const CorpusLocation& authentic, const CorpusLocation& synthetic, const CorpusLocation& out,
                       const MixSpec& spec, const TagSpec* tag, Utf8Mode mode = Utf8Mode::replace);

}  // namespace bitext::augment
