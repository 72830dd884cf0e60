#include "bitext/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "bitext/rng.hpp"

namespace bitext::config {

namespace fs = std::filesystem;

namespace {

std::string join_field(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

[[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& message) {
  const auto mark = at.Mark();
  const int line = mark.line >= 0 ? mark.line + 1 : 0;
  const int column = mark.column >= 0 ? mark.column + 1 : 0;
  if (line > 0) throw ValidationError(fmt::format("line {}, column {}: {}: {}", line, column, field, message), field, line, column);
  throw ValidationError(fmt::format("{}: {}", field, message), field);
}

bool is_set(const YAML::Node& n) { return n.IsDefined() && !n.IsNull(); }

void check_keys(const YAML::Node& map, const std::string& prefix, std::initializer_list<std::string_view> allowed) {
  if (!map.IsMap()) fail(map, prefix.empty() ? "<top level>" : prefix, "expected a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(kv.first, join_field(prefix, key), "unknown key");
  }
}

template <class T>
const char* type_name() {
  if constexpr (std::is_same_v<T, bool>)
    return "true or false";
  else if constexpr (std::is_unsigned_v<T>)
    return "a non-negative integer";
  else if constexpr (std::is_floating_point_v<T>)
    return "a number";
  else
    return "a string";
}

template <class T>
bool read(const YAML::Node& map, const char* key, const std::string& prefix, T& out) {
  const YAML::Node n = map[key];
  if (!is_set(n)) return false;
  const std::string field = join_field(prefix, key);
  if (!n.IsScalar()) fail(n, field, fmt::format("expected {}", type_name<T>()));
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    // yaml-cpp wraps negative values around for unsigned targets
    const auto& text = n.Scalar();
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail(n, field, fmt::format("expected {}", type_name<T>()));
  } else {
    try {
      out = n.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(n, field, fmt::format("expected {}", type_name<T>()));
    }
  }
  return true;
}

// Runs `parse` on a scalar string value, turning ConfigError into a located ValidationError.
template <class T, class Parse>
bool read_with(const YAML::Node& map, const char* key, const std::string& prefix, T& out, Parse parse) {
  std::string text;
  if (!read(map, key, prefix, text)) return false;
  try {
    out = parse(text);
  } catch (const ConfigError& e) {
    fail(map[key], join_field(prefix, key), e.what());
  }
  return true;
}

template <class T, class Parse>
bool read_list(const YAML::Node& map, const char* key, const std::string& prefix, std::vector<T>& out, Parse parse) {
  const YAML::Node n = map[key];
  if (!is_set(n)) return false;
  const std::string field = join_field(prefix, key);
  if (!n.IsSequence()) fail(n, field, "expected a list");
  out.clear();
  for (const auto& item : n) {
    if (!item.IsScalar()) fail(item, field, "expected a list of names");
    try {
      out.push_back(parse(item.Scalar()));
    } catch (const ConfigError& e) {
      fail(item, field, e.what());
    }
  }
  return true;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  if (value == "-" || base.empty()) return value;
  fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

bool read_path(const YAML::Node& map, const char* key, const std::string& prefix, const fs::path& base, fs::path& out) {
  std::string text;
  if (!read(map, key, prefix, text)) return false;
  if (text.empty()) fail(map[key], join_field(prefix, key), "empty path");
  out = resolve(base, text);
  return true;
}

bool read_path(const YAML::Node& map, const char* key, const std::string& prefix, const fs::path& base,
               std::optional<fs::path>& out) {
  fs::path p;
  if (!read_path(map, key, prefix, base, p)) return false;
  out = std::move(p);
  return true;
}

std::chrono::milliseconds seconds_to_ms(double s) { return std::chrono::milliseconds(static_cast<long long>(s * 1000.0)); }

CorpusFormat parse_format(std::string_view name) {
  if (name == "paired") return CorpusFormat::paired;
  if (name == "tsv") return CorpusFormat::tsv;
  throw ConfigError("unknown corpus format '" + std::string(name) + "' (expected paired or tsv)");
}

bt::Schedule parse_schedule(std::string_view name) {
  if (name == "ping_pong") return bt::Schedule::ping_pong;
  if (name == "simultaneous") return bt::Schedule::simultaneous;
  throw ConfigError("unknown schedule '" + std::string(name) + "' (expected ping_pong or simultaneous)");
}

bt::StopMode parse_stop(std::string_view name) {
  if (name == "rule") return bt::StopMode::rule;
  if (name == "force") return bt::StopMode::force;
  throw ConfigError("unknown stop mode '" + std::string(name) + "' (expected rule or force)");
}

const char* to_string(bt::Schedule s) { return s == bt::Schedule::ping_pong ? "ping_pong" : "simultaneous"; }
const char* to_string(bt::StopMode s) { return s == bt::StopMode::rule ? "rule" : "force"; }

std::string language_code(std::string_view lang) {
  if (lang != "en" && lang != "is") throw ConfigError("unknown language '" + std::string(lang) + "' (expected en or is)");
  return std::string(lang);
}

void parse_paths(const YAML::Node& n, const fs::path& base, PathsConfig& out) {
  const std::string p = "paths";
  check_keys(n, p, {"authentic", "authentic_format", "authentic_direction", "mono", "work_dir", "tmp_dir"});
  read_path(n, "authentic", p, base, out.authentic);
  read_with(n, "authentic_format", p, out.authentic_format, parse_format);
  read_with(n, "authentic_direction", p, out.authentic_direction, bt::parse_direction);
  if (const YAML::Node mono = n["mono"]; is_set(mono)) {
    check_keys(mono, "paths.mono", {"en", "is"});
    for (const char* lang : {"en", "is"}) {
      fs::path path;
      if (read_path(mono, lang, "paths.mono", base, path)) out.mono[lang] = path;
    }
  }
  read_path(n, "work_dir", p, base, out.work_dir);
  read_path(n, "tmp_dir", p, base, out.tmp_dir);
}

void parse_filters(const YAML::Node& n, const fs::path& base, FiltersConfig& out) {
  const std::string p = "filters";
  check_keys(n, p,
             {"chain", "min_chars", "max_chars", "max_tokens", "length_ratio_max", "charset_source", "charset_target",
              "charset_tolerance", "edit_distance_min_normalized", "symbol_slack", "all_caps_min_letters",
              "normalize_dashes", "mojibake_table", "regex_fixes", "apply_to_authentic"});
  read_list(n, "chain", p, out.chain, filters::parse_filter_id);
  auto& f = out.params;
  read(n, "min_chars", p, f.min_chars);
  read(n, "max_chars", p, f.max_chars);
  read(n, "max_tokens", p, f.max_tokens);
  read(n, "length_ratio_max", p, f.length_ratio_max);
  read_with(n, "charset_source", p, out.charset_source, language_code);
  read_with(n, "charset_target", p, out.charset_target, language_code);
  read(n, "charset_tolerance", p, f.charset_tolerance);
  read(n, "edit_distance_min_normalized", p, f.edit_distance_min_normalized);
  read(n, "symbol_slack", p, f.symbol_slack);
  read(n, "all_caps_min_letters", p, f.all_caps_min_letters);
  read(n, "normalize_dashes", p, f.normalize_dashes);
  read_path(n, "mojibake_table", p, base, out.mojibake_table);
  read_path(n, "regex_fixes", p, base, out.regex_fixes);
  read(n, "apply_to_authentic", p, out.apply_to_authentic);
}

void parse_noise(const YAML::Node& n, PipelineConfig& c) {
  const std::string p = "noise";
  check_keys(n, p, {"enabled", "k", "p_mask", "p_drop", "mask_token", "order"});
  read(n, "enabled", p, c.noise_enabled);
  read(n, "k", p, c.noise.k);
  read(n, "p_mask", p, c.noise.p_mask);
  read(n, "p_drop", p, c.noise.p_drop);
  read(n, "mask_token", p, c.noise.mask_token);
  read_list(n, "order", p, c.noise.order, noising::parse_noise_op);
}

void parse_translator(const YAML::Node& n, bt::TranslatorSpec& t) {
  const std::string p = "translator";
  check_keys(n, p, {"command", "batch_size", "timeout_s", "workers", "max_retries"});
  read(n, "command", p, t.command);
  read(n, "batch_size", p, t.batch_size);
  double timeout_s = 0;
  if (read(n, "timeout_s", p, timeout_s)) {
    if (!(timeout_s >= 0)) fail(n["timeout_s"], "translator.timeout_s", "must be >= 0");
    t.timeout = seconds_to_ms(timeout_s);
  }
  read(n, "workers", p, t.workers);
  read(n, "max_retries", p, t.max_retries);
}

void parse_bt(const YAML::Node& n, BtSection& b) {
  const std::string p = "bt";
  check_keys(n, p, {"directions", "schedule", "stop", "max_iterations", "trainer_command", "trainer_timeout_s"});
  read_list(n, "directions", p, b.directions, bt::parse_direction);
  read_with(n, "schedule", p, b.schedule, parse_schedule);
  read_with(n, "stop", p, b.stop, parse_stop);
  read(n, "max_iterations", p, b.max_iterations);
  read(n, "trainer_command", p, b.trainer_command);
  if (read(n, "trainer_timeout_s", p, b.trainer_timeout_s) && !(b.trainer_timeout_s >= 0))
    fail(n["trainer_timeout_s"], "bt.trainer_timeout_s", "must be >= 0");
}

PipelineConfig parse_root(const YAML::Node& root, const fs::path& base) {
  PipelineConfig c = default_config();
  if (!is_set(root)) return c;
  check_keys(root, "",
             {"seed", "direction", "paths", "filters", "dedup", "noise", "tag", "mix", "translator", "decode", "bt", "bleu"});
  read(root, "seed", "", c.seed);
  read_with(root, "direction", "", c.direction, bt::parse_direction);
  if (const YAML::Node n = root["paths"]; is_set(n)) parse_paths(n, base, c.paths);
  if (const YAML::Node n = root["filters"]; is_set(n)) parse_filters(n, base, c.filters);
  if (const YAML::Node n = root["dedup"]; is_set(n)) {
    check_keys(n, "dedup", {"key"});
    read_with(n, "key", "dedup", c.dedup, parse_key_mode);
  }
  if (const YAML::Node n = root["noise"]; is_set(n)) parse_noise(n, c);
  if (const YAML::Node n = root["tag"]; is_set(n)) {
    check_keys(n, "tag", {"enabled", "token"});
    read(n, "enabled", "tag", c.tag_enabled);
    read(n, "token", "tag", c.tag.tag_token);
  }
  if (const YAML::Node n = root["mix"]; is_set(n)) {
    check_keys(n, "mix", {"ratio", "mode"});
    augment::MixSpec ratio;
    if (read_with(n, "ratio", "mix", ratio, augment::parse_ratio)) {
      c.mix.ratio_authentic = ratio.ratio_authentic;
      c.mix.ratio_synthetic = ratio.ratio_synthetic;
    }
    read_with(n, "mode", "mix", c.mix.mode, augment::parse_mix_mode);
  }
  if (const YAML::Node n = root["translator"]; is_set(n)) parse_translator(n, c.translator);
  if (const YAML::Node n = root["decode"]; is_set(n)) {
    check_keys(n, "decode", {"strategy", "beam_width", "temperature"});
    read_with(n, "strategy", "decode", c.decode.strategy, bt::parse_strategy);
    read(n, "beam_width", "decode", c.decode.beam_width);
    read(n, "temperature", "decode", c.decode.sampling_temperature);
  }
  if (const YAML::Node n = root["bt"]; is_set(n)) parse_bt(n, c.bt);
  if (const YAML::Node n = root["bleu"]; is_set(n)) {
    check_keys(n, "bleu", {"hyp", "ref", "lang"});
    read_path(n, "hyp", "bleu", base, c.bleu.hyp);
    read_path(n, "ref", "bleu", base, c.bleu.ref);
    read(n, "lang", "bleu", c.bleu.lang);
  }
  return c;
}

// Re-raises a stage's ConfigError as a ValidationError for `section`.
template <class F>
void check_section(const char* section, F&& f) {
  try {
    f();
  } catch (const ValidationError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ValidationError(e.what(), section);
  }
}

filters::FilterConfig resolved_filter_params(const PipelineConfig& c) {
  filters::FilterConfig f = c.filters.params;
  const std::string src = c.filters.charset_source.empty() ? bt::source_lang(c.direction) : c.filters.charset_source;
  const std::string tgt = c.filters.charset_target.empty() ? bt::target_lang(c.direction) : c.filters.charset_target;
  f.charset_source = filters::Charset::for_language(src);
  f.charset_target = filters::Charset::for_language(tgt);
  if (c.filters.mojibake_table) f.mojibake_table = filters::MojibakeTable::load(*c.filters.mojibake_table);
  if (c.filters.regex_fixes) f.regex_fixes = filters::load_regex_fixes(*c.filters.regex_fixes);
  return f;
}

}  // namespace

PipelineConfig default_config() {
  PipelineConfig c;
  c.translator.command = "";
  return c;
}

std::uint64_t PipelineConfig::noise_seed() const { return derive_seed(seed, 0x6E6F697365ULL); }
std::uint64_t PipelineConfig::mix_seed() const { return derive_seed(seed, 0x6D6978ULL); }

filters::FilterChain PipelineConfig::filter_chain() const {
  return filters::FilterChain(resolved_filter_params(*this), filters.chain);
}

bt::BtConfig PipelineConfig::bt_config() const {
  bt::BtConfig b;
  b.work_dir = paths.work_dir;
  b.directions = bt.directions;
  b.schedule = bt.schedule;
  b.stop_mode = bt.stop;
  b.max_iterations = bt.max_iterations;
  if (paths.authentic)
    b.authentic = paths.authentic_format == CorpusFormat::tsv ? CorpusLocation::tsv(*paths.authentic)
                                                             : CorpusLocation::with_prefix(*paths.authentic);
  b.corpus_direction = paths.authentic_direction;
  if (filters.apply_to_authentic) {
    // The authentic corpus is filtered in its own orientation.
    PipelineConfig oriented = *this;
    oriented.direction = paths.authentic_direction;
    b.authentic_filter = oriented.filter_chain();
  }
  b.mono = paths.mono;
  b.translator = translator;
  b.decode = decode;
  b.noise_beam_outputs = noise_enabled;
  b.noise = noise;
  b.tag_enabled = tag_enabled;
  b.tag = tag;
  b.mix = mix;
  b.trainer_command = bt.trainer_command;
  b.trainer_timeout = seconds_to_ms(bt.trainer_timeout_s);
  b.seed = seed;
  return b;
}

void apply_env_overrides(PipelineConfig& config) {
  if (const char* s = std::getenv("BITEXT_SEED"); s && *s) {
    std::uint64_t seed = 0;
    const std::string_view text(s);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ValidationError("BITEXT_SEED must be a non-negative integer, got '" + std::string(text) + "'", "seed");
    config.seed = seed;
  }
  if (const char* t = std::getenv("BITEXT_TMPDIR"); t && *t) config.paths.tmp_dir = t;
  if (config.paths.tmp_dir.empty()) config.paths.tmp_dir = fs::temp_directory_path();
}

void validate(const PipelineConfig& c) {
  check_section("filters", [&] {
    if (c.filters.chain.empty()) throw ConfigError("filters.chain is empty");
    c.filters.params.validate();
  });
  check_section("noise", [&] { c.noise.validate(); });
  check_section("tag", [&] { c.tag.validate(); });
  check_section("mix", [&] { c.mix.validate(); });
  check_section("decode", [&] { c.decode.validate(); });
  if (!c.translator.command.empty()) check_section("translator", [&] { c.translator.validate(); });
  check_section("bt", [&] {
    if (c.bt.directions.empty()) throw ConfigError("bt.directions is empty");
    if (c.bt.stop == bt::StopMode::force && c.bt.max_iterations == 0)
      throw ConfigError("bt.max_iterations must be positive when bt.stop is force");
  });
}

void check_paths(const PipelineConfig& c) {
  auto need = [](const fs::path& p, const char* field) {
    if (p != "-" && !fs::exists(p)) throw ValidationError(fmt::format("{}: {} does not exist", field, p.string()), field);
  };
  if (c.paths.authentic) {
    if (c.paths.authentic_format == CorpusFormat::tsv) {
      need(*c.paths.authentic, "paths.authentic");
    } else {
      const auto loc = CorpusLocation::with_prefix(*c.paths.authentic);
      need(loc.source, "paths.authentic");
      need(loc.target, "paths.authentic");
    }
  }
  for (const auto& [lang, path] : c.paths.mono) need(path, "paths.mono");
  if (c.filters.mojibake_table) need(*c.filters.mojibake_table, "filters.mojibake_table");
  if (c.filters.regex_fixes) need(*c.filters.regex_fixes, "filters.regex_fixes");
  if (c.bleu.hyp) need(*c.bleu.hyp, "bleu.hyp");
  if (c.bleu.ref) need(*c.bleu.ref, "bleu.ref");
  // loads the tables, so their syntax is checked too
  check_section("filters", [&] { (void)c.filter_chain(); });
}

PipelineConfig parse_config(const std::string& yaml_text, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(fmt::format("line {}, column {}: {}", e.mark.line + 1, e.mark.column + 1, e.msg), e.mark.line + 1,
                     e.mark.column + 1);
  }
  PipelineConfig c = parse_root(root, base_dir);
  apply_env_overrides(c);
  validate(c);
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  fs::path base = fs::absolute(path).parent_path();
  try {
    PipelineConfig c = parse_config(text.str(), base);
    c.source_file = path;
    return c;
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line, e.column);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what(), e.field, e.line, e.column);
  }
}

nlohmann::json to_json(const PipelineConfig& c) {
  using nlohmann::json;
  auto opt_path = [](const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); };
  json chain = json::array();
  for (auto id : c.filters.chain) chain.push_back(filters::to_string(id));
  json order = json::array();
  for (auto op : c.noise.order) order.push_back(noising::to_string(op));
  json directions = json::array();
  for (auto d : c.bt.directions) directions.push_back(bt::to_string(d));
  json mono = json::object();
  for (const auto& [lang, path] : c.paths.mono) mono[lang] = path.string();
  const auto& f = c.filters.params;
  return {
      {"seed", c.seed},
      {"direction", bt::to_string(c.direction)},
      {"paths",
       {{"authentic", opt_path(c.paths.authentic)},
        {"authentic_format", c.paths.authentic_format == CorpusFormat::tsv ? "tsv" : "paired"},
        {"authentic_direction", bt::to_string(c.paths.authentic_direction)},
        {"mono", mono},
        {"work_dir", c.paths.work_dir.string()}}},
      {"filters",
       {{"chain", chain},
        {"min_chars", f.min_chars},
        {"max_chars", f.max_chars},
        {"max_tokens", f.max_tokens},
        {"length_ratio_max", f.length_ratio_max},
        {"charset_source", c.filters.charset_source.empty() ? bt::source_lang(c.direction) : c.filters.charset_source},
        {"charset_target", c.filters.charset_target.empty() ? bt::target_lang(c.direction) : c.filters.charset_target},
        {"charset_tolerance", f.charset_tolerance},
        {"edit_distance_min_normalized", f.edit_distance_min_normalized},
        {"symbol_slack", f.symbol_slack},
        {"all_caps_min_letters", f.all_caps_min_letters},
        {"normalize_dashes", f.normalize_dashes},
        {"mojibake_table", opt_path(c.filters.mojibake_table)},
        {"regex_fixes", opt_path(c.filters.regex_fixes)},
        {"apply_to_authentic", c.filters.apply_to_authentic}}},
      {"dedup", {{"key", to_string(c.dedup)}}},
      {"noise",
       {{"enabled", c.noise_enabled},
        {"k", c.noise.k},
        {"p_mask", c.noise.p_mask},
        {"p_drop", c.noise.p_drop},
        {"mask_token", c.noise.mask_token},
        {"order", order}}},
      {"tag", {{"enabled", c.tag_enabled}, {"token", c.tag.tag_token}}},
      {"mix",
       {{"ratio", fmt::format("{}:{}", c.mix.ratio_authentic, c.mix.ratio_synthetic)},
        {"mode", augment::to_string(c.mix.mode)}}},
      {"translator",
       {{"command", c.translator.command},
        {"batch_size", c.translator.batch_size},
        {"timeout_s", c.translator.timeout.count() / 1000.0},
        {"workers", c.translator.workers},
        {"max_retries", c.translator.max_retries}}},
      {"decode",
       {{"strategy", bt::to_string(c.decode.strategy)},
        {"beam_width", c.decode.beam_width},
        {"temperature", c.decode.sampling_temperature}}},
      {"bt",
       {{"directions", directions},
        {"schedule", to_string(c.bt.schedule)},
        {"stop", to_string(c.bt.stop)},
        {"max_iterations", c.bt.max_iterations},
        {"trainer_command", c.bt.trainer_command},
        {"trainer_timeout_s", c.bt.trainer_timeout_s}}},
      {"bleu", {{"hyp", opt_path(c.bleu.hyp)}, {"ref", opt_path(c.bleu.ref)}, {"lang", c.bleu.lang}}},
  };
}

}  // namespace bitext::config
