#include "bitext/corpus_io.hpp"

#include <iostream>

#include "bitext/utf8.hpp"

namespace bitext {

const char* to_string(Origin origin) { return origin == Origin::authentic ? "authentic" : "synthetic"; }

CorpusLocation CorpusLocation::with_prefix(const std::filesystem::path& prefix) {
  return paired(prefix.string() + ".src", prefix.string() + ".tgt");
}

std::size_t CorpusStats::total_drops() const {
  std::size_t n = 0;
  for (const auto& [id, count] : per_filter_drops) n += count;
  return n;
}

void CorpusStats::count_pair(const SentencePair& pair) {
  ++pair_count;
  source_tokens += utf8::count_words(pair.source);
  target_tokens += utf8::count_words(pair.target);
}

InputFile::InputFile(const std::filesystem::path& path) : path_(path) {
  if (path == "-") {
    in_ = &std::cin;
    return;
  }
  file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file_) throw DataError("cannot open " + path.string() + " for reading");
  in_ = file_.get();
}

OutputFile::OutputFile(const std::filesystem::path& path) : path_(path) {
  if (path == "-") {
    out_ = &std::cout;
    return;
  }
  file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*file_) throw DataError("cannot open " + path.string() + " for writing");
  out_ = file_.get();
}

void OutputFile::close() {
  if (file_ && !file_->is_open()) return;
  out_->flush();
  if (!*out_) throw DataError("write failed: " + path_.string());
  if (file_) {
    file_->close();
    if (!*file_) throw DataError("close failed: " + path_.string());
  }
}

LineReader::LineReader(const std::filesystem::path& path, Utf8Mode mode) : in_(path), mode_(mode) {}

std::optional<std::string> LineReader::next() {
  if (!std::getline(in_.stream(), buf_)) {
    if (in_.stream().bad()) throw DataError("read failed: " + in_.path().string());
    return std::nullopt;
  }
  ++line_no_;
  if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
  for (char& c : buf_)
    if (c == '\r') c = ' ';
  if (utf8::is_valid(buf_)) return buf_;
  if (mode_ == Utf8Mode::strict)
    throw Utf8Error(in_.path().string() + ":" + std::to_string(line_no_) + ": invalid UTF-8");
  auto fixed = utf8::repair(buf_);
  replaced_ += fixed.replaced;
  return std::move(fixed.text);
}

PairReader::PairReader(const CorpusLocation& where, Utf8Mode mode, Origin origin)
    : where_(where), origin_(origin), first_(where.source, mode) {
  if (where.format == CorpusFormat::paired) {
    if (where.source == "-" && where.target == "-") throw ConfigError("paired input cannot read both sides from stdin");
    second_.emplace(where.target, mode);
  }
}

std::optional<SentencePair> PairReader::next() {
  auto a = first_.next();
  SentencePair pair;
  pair.origin = origin_;
  if (where_.format == CorpusFormat::tsv) {
    if (!a) return std::nullopt;
    const auto tab = a->find('\t');
    if (tab == std::string::npos || a->find('\t', tab + 1) != std::string::npos) {
      const std::size_t cols = tab == std::string::npos ? 1 : 3;
      throw TsvArityError(where_.source.string() + ":" + std::to_string(first_.line_no()) + ": expected 2 columns, got " +
                          (cols == 1 ? std::string("1") : std::string("more than 2")));
    }
    pair.source = a->substr(0, tab);
    pair.target = a->substr(tab + 1);
    pair.line_no = first_.line_no();
    return pair;
  }
  auto b = second_->next();
  if (a.has_value() != b.has_value()) {
    const auto& longer = a ? first_ : *second_;
    const auto& shorter = a ? *second_ : first_;
    throw LineCountMismatch(longer.path().string() + " has more lines than " + shorter.path().string() + " (" +
                            std::to_string(shorter.line_no()) + " lines)");
  }
  if (!a) return std::nullopt;
  pair.source = std::move(*a);
  pair.target = std::move(*b);
  pair.line_no = first_.line_no();
  return pair;
}

std::size_t PairReader::invalid_utf8_replaced() const {
  return first_.replaced() + (second_ ? second_->replaced() : 0);
}

std::optional<MonoSentence> MonoReader::next() {
  auto line = lines_.next();
  if (!line) return std::nullopt;
  return MonoSentence{std::move(*line), lines_.line_no()};
}

PairWriter::PairWriter(const CorpusLocation& where) : where_(where), first_(where.source) {
  if (where.format == CorpusFormat::paired) second_.emplace(where.target);
}

namespace {

void check_line(std::string_view text, const std::filesystem::path& path) {
  if (text.find_first_of("\r\n") != std::string_view::npos)
    throw DataError("refusing to write a line break inside a sentence to " + path.string());
}

}  // namespace

void PairWriter::write(const SentencePair& pair) {
  check_line(pair.source, first_.path());
  check_line(pair.target, first_.path());
  if (where_.format == CorpusFormat::tsv) {
    if (pair.source.find('\t') != std::string::npos || pair.target.find('\t') != std::string::npos)
      throw TsvArityError("tab inside a TSV cell (line " + std::to_string(pair.line_no) + ")");
    auto& out = first_.stream();
    out << pair.source << '\t' << pair.target << '\n';
  } else {
    first_.stream() << pair.source << '\n';
    second_->stream() << pair.target << '\n';
  }
  stats_.count_pair(pair);
}

CorpusStats PairWriter::close() {
  first_.close();
  if (second_) second_->close();
  return stats_;
}

std::string normalize_key_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (auto word : utf8::split_words(text)) {
    if (pending_space) out.push_back(' ');
    out += utf8::to_lower(word);
    pending_space = true;
  }
  return out;
}

Key128 Deduplicator::key(const SentencePair& pair) const {
  if (mode_ == DedupKeyMode::exact_pair) return key_of(pair.source, pair.target);
  return key_of(normalize_key_text(pair.source), normalize_key_text(pair.target));
}

bool Deduplicator::admit_key(const Key128& key) {
  if (seen_.insert(key).second) return true;
  ++duplicates_;
  return false;
}

CorpusStats write_corpus(PairReader& reader, const CorpusLocation& destination) {
  PairWriter writer(destination);
  while (auto pair = reader.next()) writer.write(*pair);
  auto stats = writer.close();
  stats.invalid_utf8_replaced = reader.invalid_utf8_replaced();
  return stats;
}

CorpusStats compute_stats(PairReader& reader) {
  CorpusStats stats;
  while (auto pair = reader.next()) stats.count_pair(*pair);
  stats.invalid_utf8_replaced = reader.invalid_utf8_replaced();
  return stats;
}

DedupKeyMode parse_key_mode(std::string_view name) {
  if (name == "exact_pair") return DedupKeyMode::exact_pair;
  if (name == "normalized_pair") return DedupKeyMode::normalized_pair;
  throw ConfigError("unknown dedup key mode '" + std::string(name) + "' (expected exact_pair or normalized_pair)");
}

const char* to_string(DedupKeyMode mode) {
  return mode == DedupKeyMode::exact_pair ? "exact_pair" : "normalized_pair";
}

}  // namespace bitext
