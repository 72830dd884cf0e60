#pragma once

// Pipeline configuration: one YAML file with a section per stage.
//
//   seed: 42
//   direction: en-is
//   paths: {authentic: data/train, mono: {en: mono.en, is: mono.is}, work_dir: bt}
//   filters: {chain: [empty, length], max_chars: 500}
//   mix: {ratio: "1:2"}
//
// Every key is optional; unknown keys are rejected. Relative paths are
// resolved against the directory holding the config file.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bitext/augment.hpp"
#include "bitext/bt_loop.hpp"
#include "bitext/corpus_io.hpp"
#include "bitext/filters.hpp"
#include "bitext/noising.hpp"

namespace bitext::config {

// Malformed YAML. Line and column are 1-based.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, int line, int column) : ConfigError(what), line(line), column(column) {}
  int line;
  int column;
};

// Well-formed YAML with a bad or unknown field. Line and column are 1-based,
// or 0 when the problem is not tied to one place in the file.
class ValidationError : public ConfigError {
 public:
  ValidationError(const std::string& what, std::string field, int line = 0, int column = 0)
      : ConfigError(what), field(std::move(field)), line(line), column(column) {}
  std::string field;
  int line;
  int column;
};

struct PathsConfig {
  std::optional<std::filesystem::path> authentic;  // prefix (.src/.tgt) or TSV file
  CorpusFormat authentic_format = CorpusFormat::paired;
  bt::Direction authentic_direction = bt::Direction::en_is;
  std::map<std::string, std::filesystem::path> mono;  // language -> file
  std::filesystem::path work_dir = "bt_work";
  std::filesystem::path tmp_dir;  // scratch space; defaults to the system temp dir
};

struct FiltersConfig {
  std::vector<filters::FilterId> chain = filters::default_chain();
  filters::FilterConfig params;
  std::string charset_source;  // language codes; derived from `direction` when empty
  std::string charset_target;
  std::optional<std::filesystem::path> mojibake_table;
  std::optional<std::filesystem::path> regex_fixes;
  bool apply_to_authentic = true;  // in the backtranslation loop
};

struct BtSection {
  std::vector<bt::Direction> directions = {bt::Direction::en_is, bt::Direction::is_en};
  bt::Schedule schedule = bt::Schedule::ping_pong;
  bt::StopMode stop = bt::StopMode::rule;
  std::size_t max_iterations = 0;
  std::string trainer_command = "true";
  double trainer_timeout_s = 0.0;
};

struct BleuSection {
  std::optional<std::filesystem::path> hyp;
  std::optional<std::filesystem::path> ref;
  std::string lang;  // e.g. "en-is"; empty leaves it out of the signature
};

struct PipelineConfig {
  std::filesystem::path source_file;  // empty for built-in defaults
  std::uint64_t seed = 0;
  bt::Direction direction = bt::Direction::en_is;
  PathsConfig paths;
  FiltersConfig filters;
  DedupKeyMode dedup = DedupKeyMode::exact_pair;
  noising::NoiseConfig noise;
  bool noise_enabled = true;
  bool tag_enabled = true;
  augment::TagSpec tag;
  augment::MixSpec mix;
  bt::TranslatorSpec translator;
  bt::DecodeParams decode;
  BtSection bt;
  BleuSection bleu;

  // Filter config with charsets and tables resolved.
  filters::FilterChain filter_chain() const;
  bt::BtConfig bt_config() const;
  // Seeds for stochastic stages, derived from `seed`.
  std::uint64_t noise_seed() const;
  std::uint64_t mix_seed() const;
};

// Parses, applies defaults and environment overrides (BITEXT_SEED,
// BITEXT_TMPDIR), and validates every section.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& yaml_text, const std::filesystem::path& base_dir = {});
PipelineConfig default_config();

// Applies BITEXT_SEED and BITEXT_TMPDIR when set.
void apply_env_overrides(PipelineConfig& config);

// Stage-level invariants; throws ValidationError.
void validate(const PipelineConfig& config);
// Every configured input path must exist; throws ValidationError.
void check_paths(const PipelineConfig& config);

nlohmann::json to_json(const PipelineConfig& config);

}  // namespace bitext::config
