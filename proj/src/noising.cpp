#include "bitext/noising.hpp"

#include <algorithm>
#include <numeric>

#include "bitext/utf8.hpp"

namespace bitext::noising {

const char* to_string(NoiseOp op) {
  switch (op) {
    case NoiseOp::drop: return "drop";
    case NoiseOp::mask: return "mask";
    case NoiseOp::permute: return "permute";
  }
  return "?";
}

NoiseOp parse_noise_op(std::string_view name) {
  if (name == "drop") return NoiseOp::drop;
  if (name == "mask") return NoiseOp::mask;
  if (name == "permute") return NoiseOp::permute;
  throw ConfigError("unknown noise op '" + std::string(name) + "' (expected drop, mask or permute)");
}

void NoiseConfig::validate() const {
  if (k < 1) throw ConfigError("noise.k must be >= 1");
  if (!(p_mask >= 0.0 && p_mask <= 1.0)) throw ConfigError("noise.p_mask must be in [0, 1]");
  if (!(p_drop >= 0.0 && p_drop <= 1.0)) throw ConfigError("noise.p_drop must be in [0, 1]");
  if (mask_token.empty()) throw ConfigError("noise.mask_token must not be empty");
  if (utf8::count_words(mask_token) != 1 || utf8::trim(mask_token) != mask_token)
    throw ConfigError("noise.mask_token must not contain whitespace");
}

Words permute_within_k(Words words, std::size_t k, Rng& rng) {
  const std::size_t n = words.size();
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) score[i] = static_cast<double>(i) + rng.uniform() * static_cast<double>(k);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  Words out;
  out.reserve(n);
  for (std::size_t i : idx) out.push_back(std::move(words[i]));
  return out;
}

Words mask_words(Words words, double p_mask, std::string_view mask_token, Rng& rng) {
  for (auto& w : words)
    if (rng.bernoulli(p_mask)) w.assign(mask_token);
  return words;
}

Words drop_words(Words words, double p_drop, Rng& rng) {
  if (words.empty()) return words;
  std::vector<char> keep(words.size());
  std::size_t kept = 0;
  for (auto& k : keep) {
    k = !rng.bernoulli(p_drop);
    kept += k;
  }
  if (kept == 0) keep[rng.below(words.size())] = 1;
  Words out;
  out.reserve(std::max<std::size_t>(kept, 1));
  for (std::size_t i = 0; i < words.size(); ++i)
    if (keep[i]) out.push_back(std::move(words[i]));
  return out;
}

std::string noise_sentence(std::string_view text, const NoiseConfig& config, std::uint64_t ordinal) {
  Words words;
  for (auto w : utf8::split_words(text)) words.emplace_back(w);
  if (words.empty()) throw EmptyInput("cannot noise an empty sentence (ordinal " + std::to_string(ordinal) + ")");
  Rng rng = Rng::stream(config.seed, ordinal);
  for (NoiseOp op : config.order) {
    switch (op) {
      case NoiseOp::drop: words = drop_words(std::move(words), config.p_drop, rng); break;
      case NoiseOp::mask: words = mask_words(std::move(words), config.p_mask, config.mask_token, rng); break;
      case NoiseOp::permute: words = permute_within_k(std::move(words), config.k, rng); break;
    }
  }
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

}  // namespace bitext::noising
