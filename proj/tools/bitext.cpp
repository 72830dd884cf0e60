// bitext: command-line front end for the corpus pipeline.
//
// Exit status: 0 on success, 1 for data errors, 2 for usage or
// configuration errors. "-" names stdin or stdout wherever a path is taken.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "bitext/augment.hpp"
#include "bitext/bleu.hpp"
#include "bitext/bt_loop.hpp"
#include "bitext/config.hpp"
#include "bitext/corpus_io.hpp"
#include "bitext/filters.hpp"
#include "bitext/hash.hpp"
#include "bitext/kernels.hpp"
#include "bitext/noising.hpp"
#include "bitext/report.hpp"
#include "bitext/stages.hpp"
#include "bitext/utf8.hpp"

namespace fs = std::filesystem;
using namespace bitext;

namespace {

struct Common {
  std::string config_path;
  int threads = 1;
  std::string report_path;
  bool quiet = false;
  bool verbose = false;
};

// A corpus given either as a prefix (PREFIX.src / PREFIX.tgt) or a TSV file.
struct CorpusArg {
  std::string prefix;
  std::string tsv;

  bool given() const { return !prefix.empty() || !tsv.empty(); }
  CorpusLocation location() const {
    if (!prefix.empty()) return CorpusLocation::with_prefix(prefix);
    return CorpusLocation::tsv(tsv.empty() ? "-" : tsv);
  }
};

void add_corpus(CLI::App* cmd, CorpusArg& arg, const std::string& name, const std::string& what) {
  auto* p = cmd->add_option("--" + name, arg.prefix, what + " as PREFIX.src/PREFIX.tgt");
  auto* t = cmd->add_option("--" + name + "-tsv", arg.tsv, what + " as a TSV file (default: -)");
  p->excludes(t);
}

void add_common(CLI::App* cmd, Common& c, bool threads = true) {
  cmd->add_option("-c,--config", c.config_path, "pipeline config (YAML)");
  if (threads) cmd->add_option("-j,--threads", c.threads, "worker threads; 0 = all cores")->check(CLI::NonNegativeNumber);
  cmd->add_option("--report", c.report_path, "write a JSON run report here");
  cmd->add_flag("-q,--quiet", c.quiet, "no summary table on stderr");
  cmd->add_flag("-v,--verbose", c.verbose, "debug logging");
}

config::PipelineConfig load(const Common& c) {
  if (!c.config_path.empty()) return config::load_config(c.config_path);
  auto cfg = config::default_config();
  config::apply_env_overrides(cfg);
  return cfg;
}

void hash_if_file(std::map<std::string, std::string>& out, const fs::path& p) {
  if (!p.empty() && p != "-") out[p.string()] = sha256_file(p);
}

std::vector<fs::path> files_of(const CorpusLocation& loc) {
  std::vector<fs::path> out;
  for (const auto& p : {loc.source, loc.target})
    if (!p.empty() && p != "-") out.push_back(p);
  return out;
}

void emit(const Common& c, const config::PipelineConfig& cfg, std::vector<StageReport> stages) {
  RunReport report;
  report.stages = std::move(stages);
  report.config = config::to_json(cfg);
  if (!c.quiet) std::cerr << format_table(report);
  if (!c.report_path.empty()) write_json_file(c.report_path, to_json(report));
}

// Copies stdin into a temp file for stages that need random access.
class Spool {
 public:
  Spool(const fs::path& dir, std::istream& in) {
    std::string templ = (dir / "bitext-XXXXXX").string();
    const int fd = ::mkstemp(templ.data());
    if (fd < 0) throw DataError("cannot create a temp file in " + dir.string());
    ::close(fd);
    path_ = templ;
    std::ofstream out(path_, std::ios::binary);
    out << in.rdbuf();
    if (!out) throw DataError("cannot write " + path_.string());
  }
  ~Spool() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

int cmd_filter(const Common& c, const CorpusArg& in, const CorpusArg& out, const std::vector<std::string>& chain_override,
               const std::string& rejects_path) {
  auto cfg = load(c);
  if (!chain_override.empty()) {
    cfg.filters.chain.clear();
    for (const auto& name : chain_override) cfg.filters.chain.push_back(filters::parse_filter_id(name));
  }
  const auto chain = cfg.filter_chain();
  PairReader reader(in.location());
  PairWriter writer(out.location());

  std::optional<OutputFile> rejects;
  FilterObserver observer;
  if (!rejects_path.empty()) {
    rejects.emplace(rejects_path);
    observer = [&](const SentencePair& pair, const filters::ChainResult& r) {
      if (r.kept()) return;
      rejects->stream() << pair.line_no << '\t' << filters::to_string(r.decided_by) << '\t' << r.reason << '\t'
                        << pair.source << '\t' << pair.target << '\n';
    };
  }
  StageOptions opts;
  opts.threads = c.threads;
  auto report = run_filter_stage(reader, writer, chain, opts, observer);
  if (rejects) rejects->close();
  report.hash_inputs(files_of(in.location()));
  report.hash_outputs(files_of(out.location()));
  emit(c, cfg, {std::move(report)});
  return 0;
}

int cmd_dedup(const Common& c, const CorpusArg& in, const CorpusArg& out, const std::string& key) {
  auto cfg = load(c);
  if (!key.empty()) cfg.dedup = parse_key_mode(key);
  PairReader reader(in.location());
  PairWriter writer(out.location());
  Deduplicator dedup(cfg.dedup);
  StageOptions opts;
  opts.threads = c.threads;
  auto report = run_dedup_stage(reader, writer, dedup, opts);
  report.hash_inputs(files_of(in.location()));
  report.hash_outputs(files_of(out.location()));
  emit(c, cfg, {std::move(report)});
  return 0;
}

struct NoiseArgs {
  std::string input = "-";
  std::string output = "-";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<double> p_mask, p_drop;
  std::optional<std::string> mask_token;
};

int cmd_noise(const Common& c, const NoiseArgs& a) {
  auto cfg = load(c);
  auto noise = cfg.noise;
  noise.seed = a.seed ? *a.seed : cfg.noise_seed();
  if (a.k) noise.k = *a.k;
  if (a.p_mask) noise.p_mask = *a.p_mask;
  if (a.p_drop) noise.p_drop = *a.p_drop;
  if (a.mask_token) noise.mask_token = *a.mask_token;
  noise.validate();

  const auto start = std::chrono::steady_clock::now();
  MonoReader reader(a.input);
  OutputFile out(a.output);
  StageReport report;
  report.name = "noise";
  std::vector<std::string> batch;
  std::vector<std::size_t> line_nos;
  auto flush = [&] {
    auto noised = c.threads == 1 ? kernels::noise_batch_serial(batch, noise, line_nos.front() - 1)
                                 : kernels::noise_batch_parallel(batch, noise, line_nos.front() - 1, c.threads);
    for (std::size_t i = 0; i < noised.size(); ++i) {
      out.stream() << noised[i] << '\n';
      report.output.source_tokens += utf8::count_words(noised[i]);
    }
    report.output.pair_count += noised.size();
    batch.clear();
    line_nos.clear();
  };
  while (auto s = reader.next()) {
    ++report.input_count;
    if (utf8::count_words(s->text) == 0) throw noising::EmptyInput(fmt::format("{}:{}: empty line", a.input, s->line_no));
    batch.push_back(std::move(s->text));
    line_nos.push_back(s->line_no);
    if (batch.size() == 4096) flush();
  }
  if (!batch.empty()) flush();
  out.close();
  report.output.invalid_utf8_replaced = reader.invalid_utf8_replaced();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  hash_if_file(report.input_hashes, a.input);
  hash_if_file(report.output_hashes, a.output);
  emit(c, cfg, {std::move(report)});
  return 0;
}

int cmd_tag(const Common& c, const CorpusArg& in, const CorpusArg& out, const std::string& token) {
  auto cfg = load(c);
  if (!token.empty()) cfg.tag.tag_token = token;
  cfg.tag.validate();
  const auto start = std::chrono::steady_clock::now();
  PairReader reader(in.location(), Utf8Mode::replace, Origin::synthetic);
  PairWriter writer(out.location());
  StageReport report;
  report.name = "tag";
  while (auto pair = reader.next()) {
    ++report.input_count;
    writer.write(augment::tag_synthetic(std::move(*pair), cfg.tag));
  }
  report.output = writer.close();
  report.output.invalid_utf8_replaced = reader.invalid_utf8_replaced();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.hash_inputs(files_of(in.location()));
  report.hash_outputs(files_of(out.location()));
  emit(c, cfg, {std::move(report)});
  return 0;
}

struct MixArgs {
  CorpusArg authentic, synthetic, out;
  std::string ratio;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::string tag;  // token; enables tagging
  bool no_tag = false;
};

int cmd_mix(const Common& c, const MixArgs& a) {
  auto cfg = load(c);
  auto spec = cfg.mix;
  if (!a.ratio.empty()) {
    const auto r = augment::parse_ratio(a.ratio);
    spec.ratio_authentic = r.ratio_authentic;
    spec.ratio_synthetic = r.ratio_synthetic;
  }
  if (!a.mode.empty()) spec.mode = augment::parse_mix_mode(a.mode);
  spec.shuffle_seed = a.seed ? *a.seed : cfg.mix_seed();
  spec.validate();
  // Tagging is opt-in on the command line; a config file brings its own tag section.
  bool tag = !c.config_path.empty() && cfg.tag_enabled;
  if (!a.tag.empty()) {
    tag = true;
    cfg.tag.tag_token = a.tag;
  }
  if (a.no_tag) tag = false;

  auto auth = a.authentic.location();
  auto synth = a.synthetic.location();
  if (auth.format == CorpusFormat::tsv && synth.format == CorpusFormat::tsv && auth.source == "-" && synth.source == "-")
    throw ConfigError("only one of the mix inputs can come from stdin");
  std::optional<Spool> spool;
  for (auto* loc : {&auth, &synth}) {
    if (loc->format == CorpusFormat::tsv && loc->source == "-") {
      spool.emplace(cfg.paths.tmp_dir, std::cin);
      loc->source = spool->path();
    }
  }

  const auto start = std::chrono::steady_clock::now();
  const auto stats = augment::mix_files(auth, synth, a.out.location(), spec, tag ? &cfg.tag : nullptr);
  StageReport report;
  report.name = "mix";
  report.input_count = stats.authentic_in + stats.synthetic_in;
  report.output = stats.written;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!spool) {
    auto in_files = files_of(auth);
    for (auto& p : files_of(synth)) in_files.push_back(p);
    report.hash_inputs(in_files);
  }
  report.hash_outputs(files_of(a.out.location()));
  if (!stats.plan.ratio_reachable)
    spdlog::warn("ratio {}:{} not reachable with {} authentic and {} synthetic pairs in mode {}", spec.ratio_authentic,
                 spec.ratio_synthetic, stats.authentic_in, stats.synthetic_in, augment::to_string(spec.mode));
  if (!c.quiet)
    std::cerr << fmt::format("mixed {} authentic + {} synthetic = {} pairs (copies per authentic pair: {:.3f})\n",
                             stats.plan.authentic_out, stats.plan.synthetic_out, stats.written.pair_count,
                             stats.plan.base_copies);
  emit(c, cfg, {std::move(report)});
  return 0;
}

int cmd_bt_run(const Common& c, const std::string& work_dir) {
  if (c.config_path.empty()) throw ConfigError("bt-run needs --config");
  auto cfg = load(c);
  if (!work_dir.empty()) cfg.paths.work_dir = work_dir;
  config::check_paths(cfg);
  if (!cfg.paths.authentic) throw config::ValidationError("paths.authentic is required for bt-run", "paths.authentic");
  const auto bt_cfg = cfg.bt_config();
  const auto result = bt::run_bt_loop(bt_cfg);

  RunReport report;
  report.config = config::to_json(cfg);
  nlohmann::json iterations = nlohmann::json::array();
  for (const auto& it : result.iterations) {
    for (auto stage : it.stages) {
      stage.name = fmt::format("{}/{}/{}", bt::to_string(it.direction), it.iteration, stage.name);
      report.stages.push_back(std::move(stage));
    }
    iterations.push_back({{"direction", bt::to_string(it.direction)},
                          {"iteration", it.iteration},
                          {"generator_saw_bt", it.generator_saw_bt},
                          {"resumed", it.resumed},
                          {"dir", it.artifacts.dir.string()},
                          {"mixed", it.counts.mixed},
                          {"synthetic_tagged", it.counts.synthetic_tagged}});
  }
  auto json = to_json(report);
  json["iterations"] = iterations;
  write_json_file(cfg.paths.work_dir / "run_report.json", json);
  if (!c.report_path.empty()) write_json_file(c.report_path, json);
  if (!c.quiet) {
    std::cerr << format_table(report);
    for (const auto& it : result.iterations)
      std::cerr << fmt::format("{} iteration {}: {} pairs ({} tagged synthetic){}\n", bt::to_string(it.direction),
                               it.iteration, it.counts.mixed, it.counts.synthetic_tagged, it.resumed ? " [resumed]" : "");
  }
  return 0;
}

std::vector<std::string> read_lines(const std::string& path) {
  LineReader reader(path, Utf8Mode::replace);
  std::vector<std::string> lines;
  while (auto line = reader.next()) lines.push_back(std::move(*line));
  return lines;
}

int cmd_bleu(const Common& c, std::string hyp, std::string ref, std::string lang) {
  auto cfg = load(c);
  if (hyp.empty() && cfg.bleu.hyp) hyp = cfg.bleu.hyp->string();
  if (ref.empty() && cfg.bleu.ref) ref = cfg.bleu.ref->string();
  if (lang.empty()) lang = cfg.bleu.lang;
  if (hyp.empty() || ref.empty()) throw ConfigError("bleu needs --hyp and --ref");
  if (hyp == "-" && ref == "-") throw ConfigError("--hyp and --ref cannot both be stdin");
  const auto hyps = read_lines(hyp);
  const auto refs = read_lines(ref);
  if (hyps.size() != refs.size())
    throw bleu::LengthMismatch(fmt::format("{} hypotheses but {} references", hyps.size(), refs.size()));
  if (hyps.empty()) throw bleu::EmptyCorpus("no sentences to score");
  for (std::size_t i = 0; i < refs.size(); ++i)
    if (refs[i].empty()) throw bleu::EmptyReference(fmt::format("{}:{}: empty reference", ref, i + 1));
  const auto stats = c.threads == 1 ? kernels::bleu_stats_serial(hyps, refs) : kernels::bleu_stats_parallel(hyps, refs, c.threads);
  const auto score = bleu::score_from_stats(stats);
  const auto sig = bleu::signature(lang);

  nlohmann::json record = {{"name", "BLEU"},
                           {"score", score.score},
                           {"signature", sig},
                           {"precisions", score.precisions},
                           {"brevity_penalty", score.brevity_penalty},
                           {"sys_len", score.hyp_length},
                           {"ref_len", score.ref_length},
                           {"counts", stats.matches},
                           {"totals", stats.totals},
                           {"sentences", hyps.size()}};
  std::cout << record.dump() << '\n';
  if (!c.quiet)
    std::cerr << fmt::format("{} = {:.1f} {:.1f}/{:.1f}/{:.1f}/{:.1f} (BP = {:.3f} ratio = {:.3f} hyp_len = {} ref_len = {})\n",
                             sig, score.score, 100 * score.precisions[0], 100 * score.precisions[1],
                             100 * score.precisions[2], 100 * score.precisions[3], score.brevity_penalty,
                             score.ref_length ? double(score.hyp_length) / double(score.ref_length) : 0.0,
                             score.hyp_length, score.ref_length);
  if (!c.report_path.empty()) write_json_file(c.report_path, record);
  return 0;
}

int cmd_stats(const Common& c, const CorpusArg& in) {
  const auto start = std::chrono::steady_clock::now();
  PairReader reader(in.location());
  StageReport report;
  report.name = "stats";
  report.output = compute_stats(reader);
  report.input_count = report.output.pair_count;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.hash_inputs(files_of(in.location()));
  std::cout << to_json(report.output).dump(2) << '\n';
  RunReport run;
  run.stages.push_back(report);
  if (!c.quiet) std::cerr << format_table(run);
  if (!c.report_path.empty()) write_json_file(c.report_path, to_json(run));
  return 0;
}

int cmd_validate(const std::string& path) {
  const auto cfg = config::load_config(path);
  config::check_paths(cfg);
  std::cout << path << ": ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  auto logger = spdlog::stderr_color_mt("bitext");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Bitext corpus pipeline: filter, dedup, noise, tag, mix, backtranslate, score."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bitext 0.1.0");

  Common common;
  CorpusArg in, out;

  auto* filter = app.add_subcommand("filter", "run the filter chain over a bitext");
  add_common(filter, common);
  add_corpus(filter, in, "in", "input");
  add_corpus(filter, out, "out", "output");
  std::vector<std::string> chain;
  std::string rejects;
  filter->add_option("--chain", chain, "filter ids in order, overriding the config")->delimiter(',');
  filter->add_option("--rejects", rejects, "write dropped pairs as line<TAB>filter<TAB>reason<TAB>source<TAB>target");

  auto* dedup = app.add_subcommand("dedup", "drop repeated pairs, keeping the first");
  add_common(dedup, common);
  add_corpus(dedup, in, "in", "input");
  add_corpus(dedup, out, "out", "output");
  std::string key;
  dedup->add_option("--key", key, "exact_pair or normalized_pair");

  auto* noise = app.add_subcommand("noise", "apply seeded word noise to one sentence per line");
  add_common(noise, common);
  NoiseArgs noise_args;
  noise->add_option("-i,--input", noise_args.input, "input lines (default: -)");
  noise->add_option("-o,--output", noise_args.output, "output lines (default: -)");
  noise->add_option("--seed", noise_args.seed, "noise seed");
  noise->add_option("--k", noise_args.k, "permutation window");
  noise->add_option("--p-mask", noise_args.p_mask, "mask probability");
  noise->add_option("--p-drop", noise_args.p_drop, "drop probability");
  noise->add_option("--mask-token", noise_args.mask_token, "mask token");

  auto* tag = app.add_subcommand("tag", "prefix the source side of synthetic pairs with the tag token");
  add_common(tag, common, false);
  add_corpus(tag, in, "in", "input");
  add_corpus(tag, out, "out", "output");
  std::string token;
  tag->add_option("--token", token, "tag token (default <bt>)");

  auto* mix = app.add_subcommand("mix", "mix authentic and synthetic pairs at a ratio");
  add_common(mix, common, false);
  MixArgs mix_args;
  add_corpus(mix, mix_args.authentic, "authentic", "authentic corpus");
  add_corpus(mix, mix_args.synthetic, "synthetic", "synthetic corpus");
  add_corpus(mix, mix_args.out, "out", "output");
  mix->add_option("--ratio", mix_args.ratio, "authentic:synthetic, e.g. 1:2");
  mix->add_option("--mode", mix_args.mode, "upsample_authentic or downsample_synthetic");
  mix->add_option("--seed", mix_args.seed, "shuffle seed");
  auto* tag_opt = mix->add_option("--tag", mix_args.tag, "tag synthetic sources with this token, e.g. <bt>");
  mix->add_flag("--no-tag", mix_args.no_tag, "do not tag synthetic pairs")->excludes(tag_opt);

  auto* bt_run = app.add_subcommand("bt-run", "run the iterative backtranslation loop");
  add_common(bt_run, common, false);
  std::string work_dir;
  bt_run->add_option("--work-dir", work_dir, "override paths.work_dir");

  auto* bleu_cmd = app.add_subcommand("bleu", "corpus BLEU of hypotheses against one reference each");
  add_common(bleu_cmd, common);
  std::string hyp, ref, lang;
  bleu_cmd->add_option("--hyp", hyp, "hypotheses, one per line");
  bleu_cmd->add_option("--ref", ref, "references, one per line");
  bleu_cmd->add_option("--lang", lang, "language pair for the signature, e.g. en-is");

  auto* stats = app.add_subcommand("stats", "count pairs and tokens");
  add_common(stats, common, false);
  add_corpus(stats, in, "in", "input");

  auto* validate = app.add_subcommand("validate-config", "check a config file and the paths it names");
  std::string validate_path;
  validate->add_option("config", validate_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (common.verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (filter->parsed()) return cmd_filter(common, in, out, chain, rejects);
    if (dedup->parsed()) return cmd_dedup(common, in, out, key);
    if (noise->parsed()) return cmd_noise(common, noise_args);
    if (tag->parsed()) return cmd_tag(common, in, out, token);
    if (mix->parsed()) return cmd_mix(common, mix_args);
    if (bt_run->parsed()) return cmd_bt_run(common, work_dir);
    if (bleu_cmd->parsed()) return cmd_bleu(common, hyp, ref, lang);
    if (stats->parsed()) return cmd_stats(common, in);
    if (validate->parsed()) return cmd_validate(validate_path);
  } catch (const ConfigError& e) {
    std::cerr << "bitext: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "bitext: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "bitext: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "bitext: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
