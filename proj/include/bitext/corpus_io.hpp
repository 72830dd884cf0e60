#pragma once

// Streaming corpus readers and writers, deduplication and corpus counting.
//
// Two on-disk layouts are supported: paired files (`name.src` / `name.tgt`,
// one sentence per line, aligned by line number) and TSV (one pair per line,
// exactly two tab-separated cells). The path "-" means stdin / stdout.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>

#include "bitext/hash.hpp"
#include "bitext/types.hpp"

namespace bitext {

enum class Utf8Mode { replace, strict };

enum class CorpusFormat { paired, tsv };

struct CorpusLocation {
  CorpusFormat format = CorpusFormat::paired;
  std::filesystem::path source;  // .src file, or the TSV file
  std::filesystem::path target;  // .tgt file; unused for TSV

  static CorpusLocation paired(std::filesystem::path src, std::filesystem::path tgt) {
    return {CorpusFormat::paired, std::move(src), std::move(tgt)};
  }
  static CorpusLocation tsv(std::filesystem::path file) { return {CorpusFormat::tsv, std::move(file), {}}; }
  // `prefix.src` / `prefix.tgt`
  static CorpusLocation with_prefix(const std::filesystem::path& prefix);
};

struct CorpusStats {
  std::size_t pair_count = 0;
  std::map<std::string, std::size_t> per_filter_drops;
  std::map<std::string, std::size_t> per_filter_fixes;
  std::map<std::string, std::size_t> drop_reasons;
  std::size_t duplicate_count = 0;
  std::size_t source_tokens = 0;
  std::size_t target_tokens = 0;
  std::size_t invalid_utf8_replaced = 0;

  std::size_t total_drops() const;
  void count_pair(const SentencePair& pair);
};

// Opens a file for reading, or returns stdin for "-".
class InputFile {
 public:
  explicit InputFile(const std::filesystem::path& path);
  std::istream& stream() { return *in_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::unique_ptr<std::ifstream> file_;
  std::istream* in_;
};

class OutputFile {
 public:
  explicit OutputFile(const std::filesystem::path& path);
  std::ostream& stream() { return *out_; }
  const std::filesystem::path& path() const { return path_; }
  void close();  // idempotent

 private:
  std::filesystem::path path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

// Reads lines, stripping the LF (and a CR before it), validating UTF-8.
class LineReader {
 public:
  LineReader(const std::filesystem::path& path, Utf8Mode mode);
  std::optional<std::string> next();
  std::size_t line_no() const { return line_no_; }
  std::size_t replaced() const { return replaced_; }
  const std::filesystem::path& path() const { return in_.path(); }

 private:
  InputFile in_;
  Utf8Mode mode_;
  std::size_t line_no_ = 0;
  std::size_t replaced_ = 0;
  std::string buf_;
};

class PairReader {
 public:
  explicit PairReader(const CorpusLocation& where, Utf8Mode mode = Utf8Mode::replace,
                      Origin origin = Origin::authentic);
  std::optional<SentencePair> next();
  std::size_t invalid_utf8_replaced() const;

 private:
  CorpusLocation where_;
  Origin origin_;
  LineReader first_;
  std::optional<LineReader> second_;
};

class MonoReader {
 public:
  explicit MonoReader(const std::filesystem::path& path, Utf8Mode mode = Utf8Mode::replace) : lines_(path, mode) {}
  std::optional<MonoSentence> next();
  std::size_t invalid_utf8_replaced() const { return lines_.replaced(); }

 private:
  LineReader lines_;
};

class PairWriter {
 public:
  explicit PairWriter(const CorpusLocation& where);
  void write(const SentencePair& pair);
  // Flushes and closes; returns the stats of everything written.
  CorpusStats close();
  const CorpusStats& stats() const { return stats_; }

 private:
  CorpusLocation where_;
  OutputFile first_;
  std::optional<OutputFile> second_;
  CorpusStats stats_;
};

enum class DedupKeyMode { exact_pair, normalized_pair };

// Keeps the first occurrence of each key. Memory grows with the number of
// distinct keys only (16 bytes of digest per key plus table overhead).
class Deduplicator {
 public:
  explicit Deduplicator(DedupKeyMode mode = DedupKeyMode::exact_pair) : mode_(mode) {}

  Key128 key(const SentencePair& pair) const;
  // True if the pair is the first with its key.
  bool admit(const SentencePair& pair) { return admit_key(key(pair)); }
  bool admit_key(const Key128& key);

  std::size_t distinct_keys() const { return seen_.size(); }
  std::size_t duplicates() const { return duplicates_; }
  DedupKeyMode mode() const { return mode_; }

 private:
  DedupKeyMode mode_;
  std::unordered_set<Key128, Key128Hash> seen_;
  std::size_t duplicates_ = 0;
};

// Lowercases and collapses whitespace runs to one space, trimming the ends.
std::string normalize_key_text(std::string_view text);

// Drains `reader` into `writer`.
CorpusStats write_corpus(PairReader& reader, const CorpusLocation& destination);

CorpusStats compute_stats(PairReader& reader);

DedupKeyMode parse_key_mode(std::string_view name);
const char* to_string(DedupKeyMode mode);

}  // namespace bitext
