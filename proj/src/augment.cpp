#include "bitext/augment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "bitext/rng.hpp"
#include "bitext/utf8.hpp"

namespace bitext::augment {

void TagSpec::validate() const {
  if (tag_token.empty()) throw ConfigError("tag token must not be empty");
  if (utf8::count_words(tag_token) != 1 || utf8::trim(tag_token) != tag_token)
    throw ConfigError("tag token must not contain whitespace");
}

namespace {

bool has_word(std::string_view text, std::string_view word) {
  for (auto w : utf8::split_words(text))
    if (w == word) return true;
  return false;
}

std::uint64_t round_div(std::uint64_t num, std::uint64_t den) { return (2 * num + den) / (2 * den); }

void shuffle(std::vector<MixEntry>& entries, Rng& rng) {
  for (std::size_t i = entries.size(); i > 1; --i) std::swap(entries[i - 1], entries[rng.below(i)]);
}

// First `count` positions of a seeded partial Fisher-Yates over [0, n).
std::vector<std::uint32_t> pick_distinct(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(count);
  return idx;
}

}  // namespace

SentencePair tag_synthetic(SentencePair pair, const TagSpec& spec) {
  if (pair.origin != Origin::synthetic) throw OriginMismatch("only synthetic pairs can be tagged (line " + std::to_string(pair.line_no) + ")");
  if (std::find(pair.tags.begin(), pair.tags.end(), spec.tag_token) != pair.tags.end())
    throw AlreadyTagged("pair at line " + std::to_string(pair.line_no) + " already carries " + spec.tag_token);
  if (has_word(pair.source, spec.tag_token) || has_word(pair.target, spec.tag_token))
    throw TagCollision("tag token " + spec.tag_token + " already occurs in the text at line " + std::to_string(pair.line_no));
  pair.source = spec.tag_token + " " + pair.source;
  pair.tags.push_back(spec.tag_token);
  return pair;
}

SentencePair untag(SentencePair pair, const TagSpec& spec) {
  auto it = std::find(pair.tags.begin(), pair.tags.end(), spec.tag_token);
  if (it == pair.tags.end()) return pair;
  const std::string prefix = spec.tag_token + " ";
  if (pair.source.compare(0, prefix.size(), prefix) == 0) pair.source.erase(0, prefix.size());
  pair.tags.erase(it);
  return pair;
}

const char* to_string(MixMode mode) {
  return mode == MixMode::upsample_authentic ? "upsample_authentic" : "downsample_synthetic";
}

MixMode parse_mix_mode(std::string_view name) {
  if (name == "upsample_authentic") return MixMode::upsample_authentic;
  if (name == "downsample_synthetic") return MixMode::downsample_synthetic;
  throw ConfigError("unknown mix mode '" + std::string(name) + "'");
}

void MixSpec::validate() const {
  if (ratio_authentic < 1 || ratio_synthetic < 1) throw ConfigError("mix ratio parts must both be >= 1");
}

MixSpec parse_ratio(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("ratio '" + std::string(text) + "' is not of the form a:s");
  auto parse_part = [&](std::string_view part) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
      throw ConfigError("ratio '" + std::string(text) + "' is not of the form a:s");
    return v;
  };
  MixSpec spec;
  spec.ratio_authentic = parse_part(text.substr(0, colon));
  spec.ratio_synthetic = parse_part(text.substr(colon + 1));
  spec.validate();
  return spec;
}

MixPlan plan_mix(std::size_t n_authentic, std::size_t n_synthetic, const MixSpec& spec) {
  spec.validate();
  if (n_authentic == 0 && n_synthetic == 0) throw EmptyBothInputs("both authentic and synthetic inputs are empty");
  if (n_authentic > std::numeric_limits<std::uint32_t>::max() || n_synthetic > std::numeric_limits<std::uint32_t>::max())
    throw DataError("corpus too large to mix (more than 2^32 lines)");
  const std::uint64_t a = spec.ratio_authentic, s = spec.ratio_synthetic;
  Rng pick_rng = Rng::stream(spec.shuffle_seed, 1);
  Rng shuffle_rng = Rng::stream(spec.shuffle_seed, 2);

  MixPlan plan;
  plan.copies.assign(n_authentic, 1);
  std::vector<std::uint32_t> synthetic_kept;

  if (spec.mode == MixMode::upsample_authentic) {
    const std::uint64_t target = round_div(n_synthetic * a, s);
    if (n_authentic > 0) plan.base_copies = static_cast<double>(target) / static_cast<double>(n_authentic);
    if (n_authentic == 0) {
      plan.ratio_reachable = target == 0;
    } else if (target < n_authentic) {
      plan.ratio_reachable = false;
    } else {
      const std::uint32_t r = static_cast<std::uint32_t>(target / n_authentic);
      std::fill(plan.copies.begin(), plan.copies.end(), r);
      for (std::uint32_t i : pick_distinct(n_authentic, target % n_authentic, pick_rng)) ++plan.copies[i];
    }
    synthetic_kept.resize(n_synthetic);
    std::iota(synthetic_kept.begin(), synthetic_kept.end(), 0u);
  } else {
    const std::uint64_t want = round_div(n_authentic * s, a);
    plan.base_copies = 1.0;
    if (want > n_synthetic) {
      plan.ratio_reachable = false;
      synthetic_kept.resize(n_synthetic);
      std::iota(synthetic_kept.begin(), synthetic_kept.end(), 0u);
    } else {
      synthetic_kept = pick_distinct(n_synthetic, want, pick_rng);
      std::sort(synthetic_kept.begin(), synthetic_kept.end());
    }
  }

  plan.authentic_out = std::accumulate(plan.copies.begin(), plan.copies.end(), std::size_t{0});
  plan.synthetic_out = synthetic_kept.size();
  plan.entries.reserve(plan.authentic_out + plan.synthetic_out);
  for (std::uint32_t i = 0; i < n_authentic; ++i)
    for (std::uint32_t c = 0; c < plan.copies[i]; ++c) plan.entries.push_back({false, i});
  for (std::uint32_t i : synthetic_kept) plan.entries.push_back({true, i});
  shuffle(plan.entries, shuffle_rng);
  return plan;
}

std::vector<SentencePair> mix_corpora(const std::vector<SentencePair>& authentic,
                                      const std::vector<SentencePair>& synthetic, const MixSpec& spec) {
  const MixPlan plan = plan_mix(authentic.size(), synthetic.size(), spec);
  std::vector<SentencePair> out;
  out.reserve(plan.entries.size());
  for (const auto& e : plan.entries) out.push_back(e.synthetic ? synthetic[e.index] : authentic[e.index]);
  return out;
}

namespace {

// Random access to the lines of a corpus through recorded byte offsets.
class IndexedFile {
 public:
  explicit IndexedFile(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (path == "-") throw ConfigError("mixing needs seekable files, not stdin");
    if (!in_) throw DataError("cannot open " + path.string() + " for reading");
    std::string line;
    std::uint64_t pos = 0;
    while (std::getline(in_, line)) {
      offsets_.push_back(pos);
      pos += line.size() + 1;
    }
    in_.clear();
  }

  std::size_t size() const { return offsets_.size(); }
  const std::filesystem::path& path() const { return path_; }

  std::string line(std::size_t i, Utf8Mode mode) {
    in_.seekg(static_cast<std::streamoff>(offsets_[i]));
    std::string text;
    std::getline(in_, text);
    if (!text.empty() && text.back() == '\r') text.pop_back();
    for (char& c : text)
      if (c == '\r') c = ' ';
    if (utf8::is_valid(text)) return text;
    if (mode == Utf8Mode::strict) throw Utf8Error(path_.string() + ":" + std::to_string(i + 1) + ": invalid UTF-8");
    return utf8::repair(text).text;
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::vector<std::uint64_t> offsets_;
};

class IndexedCorpus {
 public:
  IndexedCorpus(const CorpusLocation& where, Origin origin, Utf8Mode mode)
      : where_(where), origin_(origin), mode_(mode), first_(where.source) {
    if (where.format == CorpusFormat::paired) {
      second_.emplace(where.target);
      if (first_.size() != second_->size())
        throw LineCountMismatch(where.source.string() + " has " + std::to_string(first_.size()) + " lines but " +
                                where.target.string() + " has " + std::to_string(second_->size()));
    }
  }

  std::size_t size() const { return first_.size(); }

  SentencePair at(std::size_t i) {
    SentencePair pair;
    pair.origin = origin_;
    pair.line_no = i + 1;
    if (where_.format == CorpusFormat::tsv) {
      std::string row = first_.line(i, mode_);
      const auto tab = row.find('\t');
      if (tab == std::string::npos || row.find('\t', tab + 1) != std::string::npos)
        throw TsvArityError(where_.source.string() + ":" + std::to_string(i + 1) + ": expected 2 columns");
      pair.source = row.substr(0, tab);
      pair.target = row.substr(tab + 1);
    } else {
      pair.source = first_.line(i, mode_);
      pair.target = second_->line(i, mode_);
    }
    return pair;
  }

 private:
  CorpusLocation where_;
  Origin origin_;
  Utf8Mode mode_;
  IndexedFile first_;
  std::optional<IndexedFile> second_;
};

}  // namespace

MixFileStats mix_files(const CorpusLocation& authentic, const CorpusLocation& synthetic, const CorpusLocation& out,
                       const MixSpec& spec, const TagSpec* tag, Utf8Mode mode) {
  if (tag) tag->validate();
  IndexedCorpus auth(authentic, Origin::authentic, mode);
  IndexedCorpus synth(synthetic, Origin::synthetic, mode);
  MixFileStats stats;
  stats.authentic_in = auth.size();
  stats.synthetic_in = synth.size();
  stats.plan = plan_mix(auth.size(), synth.size(), spec);
  PairWriter writer(out);
  for (const auto& e : stats.plan.entries) {
    if (e.synthetic) {
      SentencePair pair = synth.at(e.index);
      writer.write(tag ? tag_synthetic(std::move(pair), *tag) : pair);
    } else {
      writer.write(auth.at(e.index));
    }
  }
  stats.written = writer.close();
  return stats;
}

}  // namespace bitext::augment
