#pragma once

// Iterative backtranslation driver.
//
// Each iteration for a training direction X->Y translates Y-side monolingual
// text with the Y->X translator, pairs every translation (source) with its
// original line (target), optionally noises and tags the synthetic side,
// mixes it with the authentic corpus and hands the result to a trainer hook.
// Translator and trainer are external commands; see TranslatorSpec.
//
// Artifacts for iteration i of direction d live in <work_dir>/<d>/iter_<i>/.
// They are built in a sibling ".tmp" directory and renamed into place, so a
// visible iteration directory always holds complete corpora. manifest.json is
// written last, after the trainer hook succeeds; an iteration without a
// manifest is incomplete and gets rebuilt on the next run.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bitext/augment.hpp"
#include "bitext/corpus_io.hpp"
#include "bitext/filters.hpp"
#include "bitext/noising.hpp"
#include "bitext/report.hpp"

namespace bitext::bt {

enum class Direction { en_is, is_en };

const char* to_string(Direction d);
Direction parse_direction(std::string_view name);
Direction reverse(Direction d);
const char* source_lang(Direction d);
const char* target_lang(Direction d);

enum class DecodeStrategy { beam, sampling };
const char* to_string(DecodeStrategy s);
DecodeStrategy parse_strategy(std::string_view name);

struct DecodeParams {
  DecodeStrategy strategy = DecodeStrategy::beam;
  std::size_t beam_width = 4;
  double sampling_temperature = 1.0;

  void validate() const;
};

// Command template for the translator. Required placeholders: {direction},
// {strategy}, {beam_width}, {temperature}. Optional: {model_iteration}, the
// iteration whose checkpoint should generate (-1 = the parallel-only model).
//
// Protocol: N lines of UTF-8, each ending in LF, on stdin; exactly N lines
// on stdout, line i being the translation of input line i.
struct TranslatorSpec {
  std::string command;
  std::size_t batch_size = 256;
  std::chrono::milliseconds timeout{600'000};
  std::size_t workers = 1;       // concurrent translator processes
  std::size_t max_retries = 2;   // for line-count mismatches

  void validate() const;
};

class TranslatorError : public DataError {
 public:
  using DataError::DataError;
};
class TranslatorLineCountMismatch : public TranslatorError {
 public:
  using TranslatorError::TranslatorError;
};
class NonZeroExit : public TranslatorError {
 public:
  NonZeroExit(const std::string& what, std::string stderr_text) : TranslatorError(what), stderr_text(std::move(stderr_text)) {}
  std::string stderr_text;
};
class Timeout : public TranslatorError {
 public:
  using TranslatorError::TranslatorError;
};

std::string expand_translator_command(const TranslatorSpec& spec, Direction direction, const DecodeParams& params,
                                      long model_iteration = -1);

// One process for the whole batch.
std::vector<std::string> translate_batch(const TranslatorSpec& spec, std::span<const MonoSentence> sentences,
                                         const DecodeParams& params, Direction direction, long model_iteration = -1);

// Splits into batches of spec.batch_size, runs up to spec.workers processes
// at a time, retries line-count mismatches, and returns outputs in input order.
std::vector<std::string> translate_all(const TranslatorSpec& spec, std::span<const MonoSentence> sentences,
                                       const DecodeParams& params, Direction direction, long model_iteration = -1);

enum class Schedule { ping_pong, simultaneous };
enum class StopMode { rule, force };

struct BtConfig {
  std::filesystem::path work_dir = "bt_work";
  std::vector<Direction> directions = {Direction::en_is, Direction::is_en};
  Schedule schedule = Schedule::ping_pong;
  StopMode stop_mode = StopMode::rule;
  // force: run exactly this many iterations. rule: upper bound (0 = none).
  std::size_t max_iterations = 0;

  // Authentic corpus, with languages ordered as `corpus_direction`.
  CorpusLocation authentic;
  Direction corpus_direction = Direction::en_is;
  std::optional<filters::FilterChain> authentic_filter;

  std::map<std::string, std::filesystem::path> mono;  // language code -> file

  TranslatorSpec translator;
  DecodeParams decode;
  bool noise_beam_outputs = true;
  noising::NoiseConfig noise;
  bool tag_enabled = true;
  augment::TagSpec tag;
  augment::MixSpec mix;

  // Placeholders: {corpus_source} {corpus_target} {iteration} {direction}.
  std::string trainer_command = "true";
  std::chrono::milliseconds trainer_timeout{0};

  std::uint64_t seed = 0;

  void validate() const;
};

struct IterationArtifacts {
  std::filesystem::path dir;
  std::filesystem::path synthetic_source, synthetic_target;
  std::filesystem::path authentic_source, authentic_target;
  std::filesystem::path train_source, train_target;
  std::filesystem::path report;
  std::filesystem::path manifest;

  static IterationArtifacts under(const std::filesystem::path& dir);
};

struct IterationCounts {
  std::size_t mono_lines = 0;
  std::size_t mono_skipped_empty = 0;
  std::size_t synthetic = 0;
  std::size_t synthetic_tagged = 0;
  std::size_t authentic_in = 0;
  std::size_t authentic_kept = 0;
  std::size_t mixed = 0;
  std::size_t mixed_authentic = 0;
  std::size_t mixed_synthetic = 0;
};

struct IterationState {
  std::size_t iteration = 0;
  Direction direction = Direction::en_is;
  // Whether the model that generated this iteration's synthetic data was
  // itself trained on synthetic data.
  bool generator_saw_bt = false;
  bool completed = false;
  bool resumed = false;  // loaded from an existing manifest instead of rerun
  IterationArtifacts artifacts;
  IterationCounts counts;
  std::vector<StageReport> stages;  // timings; not part of the artifacts
};

IterationState initial_state(Direction direction);
IterationState next_state(const IterationState& done);

// Runs (or resumes) iteration `state.iteration`; returns the completed state.
IterationState run_iteration(const IterationState& state, const BtConfig& config);

// rule: stop once a completed iteration consumed data whose generator had
// seen backtranslations. force: stop after max_iterations.
bool should_stop(const IterationState& state, const BtConfig& config);

struct LoopResult {
  std::vector<IterationState> iterations;  // in execution order
  std::map<Direction, std::size_t> per_direction;
};

LoopResult run_bt_loop(const BtConfig& config);

}  // namespace bitext::bt
