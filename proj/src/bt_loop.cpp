#include "bitext/bt_loop.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "bitext/hash.hpp"
#include "bitext/rng.hpp"
#include "bitext/subprocess.hpp"
#include "bitext/utf8.hpp"

namespace bitext::bt {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Direction d) { return d == Direction::en_is ? "en-is" : "is-en"; }

Direction parse_direction(std::string_view name) {
  if (name == "en-is") return Direction::en_is;
  if (name == "is-en") return Direction::is_en;
  throw ConfigError("unknown direction '" + std::string(name) + "' (expected en-is or is-en)");
}

Direction reverse(Direction d) { return d == Direction::en_is ? Direction::is_en : Direction::en_is; }
const char* source_lang(Direction d) { return d == Direction::en_is ? "en" : "is"; }
const char* target_lang(Direction d) { return d == Direction::en_is ? "is" : "en"; }

const char* to_string(DecodeStrategy s) { return s == DecodeStrategy::beam ? "beam" : "sampling"; }

DecodeStrategy parse_strategy(std::string_view name) {
  if (name == "beam") return DecodeStrategy::beam;
  if (name == "sampling") return DecodeStrategy::sampling;
  throw ConfigError("unknown decode strategy '" + std::string(name) + "' (expected beam or sampling)");
}

void DecodeParams::validate() const {
  if (beam_width < 1) throw ConfigError("decode.beam_width must be at least 1");
  if (!(sampling_temperature > 0.0)) throw ConfigError("decode.sampling_temperature must be positive");
}

void TranslatorSpec::validate() const {
  if (command.empty()) throw ConfigError("translator.command is empty");
  for (const char* p : {"{direction}", "{strategy}", "{beam_width}", "{temperature}"})
    if (command.find(p) == std::string::npos) throw ConfigError(fmt::format("translator.command lacks the {} placeholder", p));
  if (batch_size < 1) throw ConfigError("translator.batch_size must be at least 1");
  if (workers < 1) throw ConfigError("translator.workers must be at least 1");
}

namespace {

// Replaces each {name} present in `values`; other braces are left alone.
std::string substitute(std::string_view templ, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < templ.size()) {
    if (templ[i] == '{') {
      const auto close = templ.find('}', i);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(templ.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(templ[i++]);
  }
  return out;
}

std::vector<std::string> split_output(const std::string& out) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < out.size()) {
    auto end = out.find('\n', start);
    if (end == std::string::npos) end = out.size();
    std::string line = out.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::string expand_translator_command(const TranslatorSpec& spec, Direction direction, const DecodeParams& params,
                                      long model_iteration) {
  return substitute(spec.command, {{"direction", to_string(direction)},
                                   {"strategy", to_string(params.strategy)},
                                   {"beam_width", std::to_string(params.beam_width)},
                                   {"temperature", fmt::format("{}", params.sampling_temperature)},
                                   {"model_iteration", std::to_string(model_iteration)}});
}

std::vector<std::string> translate_batch(const TranslatorSpec& spec, std::span<const MonoSentence> sentences,
                                         const DecodeParams& params, Direction direction, long model_iteration) {
  if (sentences.empty()) throw DataError("translate_batch: no sentences");
  std::string input;
  for (const auto& s : sentences) {
    if (s.text.empty()) throw DataError(fmt::format("translate_batch: empty sentence at line {}", s.line_no));
    input += s.text;
    input.push_back('\n');
  }
  const std::string command = expand_translator_command(spec, direction, params, model_iteration);
  const auto result = proc::run_shell(command, input, spec.timeout);
  if (result.timed_out) throw Timeout(fmt::format("translator timed out after {} ms: {}", spec.timeout.count(), command));
  if (!result.ok()) {
    const std::string how = result.signaled ? fmt::format("killed by signal {}", result.signal)
                                            : fmt::format("exited with status {}", result.exit_code);
    throw NonZeroExit(fmt::format("translator {}: {}\n{}", how, command, result.err), result.err);
  }
  auto lines = split_output(result.out);
  if (lines.size() != sentences.size())
    throw TranslatorLineCountMismatch(fmt::format("translator returned {} lines for {} inputs (lines {}-{})", lines.size(),
                                                  sentences.size(), sentences.front().line_no, sentences.back().line_no));
  return lines;
}

std::vector<std::string> translate_all(const TranslatorSpec& spec, std::span<const MonoSentence> sentences,
                                       const DecodeParams& params, Direction direction, long model_iteration) {
  spec.validate();
  std::vector<std::string> out(sentences.size());
  if (sentences.empty()) return out;
  const std::size_t n_batches = (sentences.size() + spec.batch_size - 1) / spec.batch_size;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_batches) return;
      {
        std::lock_guard lock(error_mu);
        if (error) return;
      }
      const std::size_t lo = b * spec.batch_size;
      const std::size_t hi = std::min(sentences.size(), lo + spec.batch_size);
      try {
        for (std::size_t attempt = 0;; ++attempt) {
          try {
            auto lines = translate_batch(spec, sentences.subspan(lo, hi - lo), params, direction, model_iteration);
            std::move(lines.begin(), lines.end(), out.begin() + static_cast<std::ptrdiff_t>(lo));
            break;
          } catch (const TranslatorLineCountMismatch& e) {
            if (attempt >= spec.max_retries) throw;
            spdlog::warn("{}; retrying ({}/{})", e.what(), attempt + 1, spec.max_retries);
          }
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const std::size_t workers = std::min(spec.workers, n_batches);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

void BtConfig::validate() const {
  if (directions.empty()) throw ConfigError("bt.directions is empty");
  if (stop_mode == StopMode::force && max_iterations == 0)
    throw ConfigError("bt.max_iterations must be positive when stop mode is force");
  for (Direction d : directions)
    if (!mono.count(target_lang(d)))
      throw ConfigError(fmt::format("no monolingual '{}' corpus configured for direction {}", target_lang(d), to_string(d)));
  translator.validate();
  decode.validate();
  noise.validate();
  tag.validate();
  mix.validate();
}

IterationArtifacts IterationArtifacts::under(const fs::path& dir) {
  IterationArtifacts a;
  a.dir = dir;
  a.synthetic_source = dir / "synthetic.src";
  a.synthetic_target = dir / "synthetic.tgt";
  a.authentic_source = dir / "authentic.src";
  a.authentic_target = dir / "authentic.tgt";
  a.train_source = dir / "train.src";
  a.train_target = dir / "train.tgt";
  a.report = dir / "report.json";
  a.manifest = dir / "manifest.json";
  return a;
}

IterationState initial_state(Direction direction) {
  IterationState s;
  s.direction = direction;
  return s;
}

IterationState next_state(const IterationState& done) {
  IterationState s;
  s.iteration = done.iteration + 1;
  s.direction = done.direction;
  s.generator_saw_bt = s.iteration >= 1;
  return s;
}

bool should_stop(const IterationState& state, const BtConfig& config) {
  if (!state.completed) return false;
  if (config.max_iterations > 0 && state.iteration + 1 >= config.max_iterations) return true;
  if (config.stop_mode == StopMode::force) return false;
  return state.generator_saw_bt;
}

namespace {

enum class SeedPurpose : std::uint64_t { noise = 1, mix = 2 };

std::uint64_t iteration_seed(std::uint64_t seed, Direction d, std::size_t iteration, SeedPurpose purpose) {
  const auto dir = static_cast<std::uint64_t>(d);
  return derive_seed(derive_seed(derive_seed(seed, dir), iteration), static_cast<std::uint64_t>(purpose));
}

fs::path iteration_dir(const BtConfig& config, Direction d, std::size_t iteration) {
  return config.work_dir / to_string(d) / fmt::format("iter_{}", iteration);
}

void write_json_atomic(const fs::path& path, const json& value) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_json_file(tmp, value);
  fs::rename(tmp, path);
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

json counts_json(const IterationCounts& c) {
  return {{"mono_lines", c.mono_lines},
          {"mono_skipped_empty", c.mono_skipped_empty},
          {"synthetic", c.synthetic},
          {"synthetic_tagged", c.synthetic_tagged},
          {"authentic_in", c.authentic_in},
          {"authentic_kept", c.authentic_kept},
          {"mixed", c.mixed},
          {"mixed_authentic", c.mixed_authentic},
          {"mixed_synthetic", c.mixed_synthetic}};
}

IterationCounts counts_from_json(const json& j) {
  IterationCounts c;
  c.mono_lines = j.at("mono_lines").get<std::size_t>();
  c.mono_skipped_empty = j.at("mono_skipped_empty").get<std::size_t>();
  c.synthetic = j.at("synthetic").get<std::size_t>();
  c.synthetic_tagged = j.at("synthetic_tagged").get<std::size_t>();
  c.authentic_in = j.at("authentic_in").get<std::size_t>();
  c.authentic_kept = j.at("authentic_kept").get<std::size_t>();
  c.mixed = j.at("mixed").get<std::size_t>();
  c.mixed_authentic = j.at("mixed_authentic").get<std::size_t>();
  c.mixed_synthetic = j.at("mixed_synthetic").get<std::size_t>();
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<MonoSentence> read_mono(const fs::path& path, std::size_t& total, std::size_t& skipped) {
  MonoReader reader(path);
  std::vector<MonoSentence> out;
  total = skipped = 0;
  while (auto s = reader.next()) {
    ++total;
    if (utf8::trim(s->text).empty()) {
      ++skipped;
      spdlog::info("{}:{}: empty line skipped", path.string(), s->line_no);
      continue;
    }
    out.push_back(std::move(*s));
  }
  return out;
}

// Steps 1-5: corpora and report in a temp directory, renamed into place.
IterationState prepare(const IterationState& state, const BtConfig& config) {
  IterationState s = state;
  s.generator_saw_bt = s.iteration >= 1;
  const Direction d = s.direction;
  const fs::path final_dir = iteration_dir(config, d, s.iteration);
  s.artifacts = IterationArtifacts::under(final_dir);

  if (fs::exists(s.artifacts.manifest)) {
    const json report = read_json(s.artifacts.report);
    s.counts = counts_from_json(report.at("counts"));
    s.resumed = true;
    s.completed = true;
    return s;
  }

  fs::path tmp_dir = final_dir;
  tmp_dir += ".tmp";
  fs::remove_all(tmp_dir);
  fs::remove_all(final_dir);  // left over from a run whose trainer failed
  fs::create_directories(tmp_dir);
  const auto tmp = IterationArtifacts::under(tmp_dir);
  const long model_iteration = static_cast<long>(s.iteration) - 1;

  // (1) translate target-language monolingual text with the reverse model
  auto start = std::chrono::steady_clock::now();
  const fs::path& mono_path = config.mono.at(target_lang(d));
  auto mono = read_mono(mono_path, s.counts.mono_lines, s.counts.mono_skipped_empty);
  if (mono.empty()) throw DataError(fmt::format("{}: no non-empty monolingual lines", mono_path.string()));
  auto translations = translate_all(config.translator, mono, config.decode, reverse(d), model_iteration);

  // (2)+(3) synthetic pairs: translation is the source, original the target
  noising::NoiseConfig noise = config.noise;
  noise.seed = iteration_seed(config.seed, d, s.iteration, SeedPurpose::noise);
  const bool apply_noise = config.decode.strategy == DecodeStrategy::beam && config.noise_beam_outputs;
  {
    PairWriter writer(CorpusLocation::paired(tmp.synthetic_source, tmp.synthetic_target));
    for (std::size_t i = 0; i < mono.size(); ++i) {
      SentencePair pair;
      pair.origin = Origin::synthetic;
      pair.line_no = mono[i].line_no;
      if (utf8::trim(translations[i]).empty())
        throw DataError(fmt::format("translator returned an empty line for {}:{}", mono_path.string(), mono[i].line_no));
      pair.source = apply_noise ? noising::noise_sentence(translations[i], noise, mono[i].line_no - 1)
                                : std::move(translations[i]);
      pair.target = std::move(mono[i].text);
      writer.write(pair);
    }
    s.counts.synthetic = writer.close().pair_count;
  }
  StageReport translate_stage;
  translate_stage.name = "translate";
  translate_stage.input_count = s.counts.mono_lines;
  translate_stage.output.pair_count = s.counts.synthetic;
  translate_stage.output.drop_reasons["empty_mono_line"] = s.counts.mono_skipped_empty;
  translate_stage.output.per_filter_drops["empty"] = s.counts.mono_skipped_empty;
  translate_stage.seconds = seconds_since(start);
  s.stages.push_back(std::move(translate_stage));

  // (4) authentic corpus: filtered in its own orientation, then oriented as d
  start = std::chrono::steady_clock::now();
  StageReport auth_stage;
  auth_stage.name = "authentic";
  {
    PairReader reader(config.authentic);
    PairWriter writer(CorpusLocation::paired(tmp.authentic_source, tmp.authentic_target));
    const bool swap = config.corpus_direction != d;
    while (auto pair = reader.next()) {
      ++s.counts.authentic_in;
      SentencePair p = std::move(*pair);
      if (config.authentic_filter) {
        auto r = config.authentic_filter->apply(p);
        if (!r.kept()) {
          ++auth_stage.output.per_filter_drops[filters::to_string(r.decided_by)];
          ++auth_stage.output.drop_reasons[r.reason];
          continue;
        }
        p = std::move(r.pair);
      }
      if (swap) std::swap(p.source, p.target);
      writer.write(p);
    }
    auto written = writer.close();
    written.per_filter_drops = std::move(auth_stage.output.per_filter_drops);
    written.drop_reasons = std::move(auth_stage.output.drop_reasons);
    written.invalid_utf8_replaced = reader.invalid_utf8_replaced();
    auth_stage.output = std::move(written);
  }
  s.counts.authentic_kept = auth_stage.output.pair_count;
  auth_stage.input_count = s.counts.authentic_in;
  auth_stage.seconds = seconds_since(start);

  start = std::chrono::steady_clock::now();
  augment::MixSpec mix = config.mix;
  mix.shuffle_seed = iteration_seed(config.seed, d, s.iteration, SeedPurpose::mix);
  const auto mixed = augment::mix_files(CorpusLocation::paired(tmp.authentic_source, tmp.authentic_target),
                                        CorpusLocation::paired(tmp.synthetic_source, tmp.synthetic_target),
                                        CorpusLocation::paired(tmp.train_source, tmp.train_target), mix,
                                        config.tag_enabled ? &config.tag : nullptr);
  s.counts.mixed = mixed.written.pair_count;
  s.counts.mixed_authentic = mixed.plan.authentic_out;
  s.counts.mixed_synthetic = mixed.plan.synthetic_out;
  s.counts.synthetic_tagged = config.tag_enabled ? mixed.plan.synthetic_out : 0;
  if (!mixed.plan.ratio_reachable)
    spdlog::warn("{} iteration {}: ratio {}:{} not reachable with {} authentic and {} synthetic pairs", to_string(d),
                 s.iteration, mix.ratio_authentic, mix.ratio_synthetic, mixed.authentic_in, mixed.synthetic_in);
  StageReport mix_stage;
  mix_stage.name = "mix";
  mix_stage.input_count = mixed.authentic_in + mixed.synthetic_in;
  mix_stage.output = mixed.written;
  mix_stage.seconds = seconds_since(start);
  s.stages.push_back(std::move(auth_stage));
  s.stages.push_back(std::move(mix_stage));

  // (5) report without timings so reruns are byte-identical
  json report = {{"iteration", s.iteration},
                 {"direction", to_string(d)},
                 {"generator_saw_bt", s.generator_saw_bt},
                 {"counts", counts_json(s.counts)},
                 {"authentic_filter", to_json(s.stages[1].output)},
                 {"mix",
                  {{"ratio", fmt::format("{}:{}", mix.ratio_authentic, mix.ratio_synthetic)},
                   {"mode", augment::to_string(mix.mode)},
                   {"base_copies", mixed.plan.base_copies},
                   {"ratio_reachable", mixed.plan.ratio_reachable}}}};
  write_json_file(tmp.report, report);

  fs::rename(tmp_dir, final_dir);
  return s;
}

// Steps 6-7: trainer hook, then the manifest that marks completion.
IterationState finish(IterationState s, const BtConfig& config) {
  if (s.completed) return s;
  const Direction d = s.direction;
  const auto& a = s.artifacts;

  const std::string command = substitute(config.trainer_command, {{"corpus_source", proc::shell_quote(a.train_source.string())},
                                                                  {"corpus_target", proc::shell_quote(a.train_target.string())},
                                                                  {"iteration", std::to_string(s.iteration)},
                                                                  {"direction", to_string(d)}});
  const auto start = std::chrono::steady_clock::now();
  const auto result = proc::run_shell(command, {}, config.trainer_timeout);
  if (result.timed_out) throw DataError(fmt::format("trainer timed out: {}", command));
  if (!result.ok())
    throw DataError(fmt::format("trainer failed (status {}): {}\n{}", result.exit_code, command, result.err));
  StageReport train_stage;
  train_stage.name = "train";
  train_stage.input_count = s.counts.mixed;
  train_stage.output.pair_count = s.counts.mixed;
  train_stage.seconds = seconds_since(start);
  s.stages.push_back(std::move(train_stage));

  json inputs = json::object();
  inputs[config.mono.at(target_lang(d)).string()] = sha256_file(config.mono.at(target_lang(d)));
  inputs[config.authentic.source.string()] = sha256_file(config.authentic.source);
  if (config.authentic.format == CorpusFormat::paired)
    inputs[config.authentic.target.string()] = sha256_file(config.authentic.target);
  json outputs = json::object();
  for (const auto& p : {a.synthetic_source, a.synthetic_target, a.authentic_source, a.authentic_target, a.train_source,
                        a.train_target, a.report})
    outputs[p.filename().string()] = sha256_file(p);

  json manifest = {{"iteration", s.iteration},
                   {"direction", to_string(d)},
                   {"generator_saw_bt", s.generator_saw_bt},
                   {"model_iteration", static_cast<long>(s.iteration) - 1},
                   {"seeds",
                    {{"run", config.seed},
                     {"noise", iteration_seed(config.seed, d, s.iteration, SeedPurpose::noise)},
                     {"mix", iteration_seed(config.seed, d, s.iteration, SeedPurpose::mix)}}},
                   {"decode",
                    {{"strategy", to_string(config.decode.strategy)},
                     {"beam_width", config.decode.beam_width},
                     {"temperature", config.decode.sampling_temperature},
                     {"noised", config.decode.strategy == DecodeStrategy::beam && config.noise_beam_outputs}}},
                   {"noise",
                    {{"k", config.noise.k}, {"p_mask", config.noise.p_mask}, {"p_drop", config.noise.p_drop},
                     {"mask_token", config.noise.mask_token}}},
                   {"tag", config.tag_enabled ? json(config.tag.tag_token) : json(nullptr)},
                   {"mix", {{"ratio", fmt::format("{}:{}", config.mix.ratio_authentic, config.mix.ratio_synthetic)},
                            {"mode", augment::to_string(config.mix.mode)}}},
                   {"inputs", inputs},
                   {"outputs", outputs}};
  write_json_atomic(a.manifest, manifest);
  s.completed = true;
  return s;
}

}  // namespace

IterationState run_iteration(const IterationState& state, const BtConfig& config) {
  return finish(prepare(state, config), config);
}

LoopResult run_bt_loop(const BtConfig& config) {
  config.validate();
  fs::create_directories(config.work_dir);
  LoopResult result;
  std::map<Direction, IterationState> pending;
  for (Direction d : config.directions) pending.emplace(d, initial_state(d));

  auto record = [&](const IterationState& done) {
    result.iterations.push_back(done);
    ++result.per_direction[done.direction];
    spdlog::info("{} iteration {} {} ({} pairs, {} synthetic)", to_string(done.direction), done.iteration,
                 done.resumed ? "resumed" : "done", done.counts.mixed, done.counts.mixed_synthetic);
    if (should_stop(done, config))
      pending.erase(done.direction);
    else
      pending[done.direction] = next_state(done);
  };

  while (!pending.empty()) {
    std::vector<Direction> active;
    for (Direction d : config.directions)
      if (pending.count(d)) active.push_back(d);

    if (config.schedule == Schedule::ping_pong || active.size() == 1) {
      for (Direction d : active) record(run_iteration(pending.at(d), config));
      continue;
    }

    // simultaneous: build every direction's corpora concurrently; trainers still run one at a time
    std::vector<IterationState> prepared(active.size());
    std::vector<std::exception_ptr> errors(active.size());
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < active.size(); ++i)
      threads.emplace_back([&, i] {
        try {
          prepared[i] = prepare(pending.at(active[i]), config);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (auto& p : prepared) record(finish(std::move(p), config));
  }
  return result;
}

}  // namespace bitext::bt
