#include "bitext/report.hpp"

#include <fmt/format.h>

#include <fstream>

#include "bitext/hash.hpp"

namespace bitext {

bool StageReport::reconciles() const {
  return input_count == output.pair_count + output.total_drops() + output.duplicate_count;
}

void StageReport::hash_inputs(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths)
    if (p != "-") input_hashes[p.string()] = sha256_file(p);
}

void StageReport::hash_outputs(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths)
    if (p != "-") output_hashes[p.string()] = sha256_file(p);
}

nlohmann::json to_json(const CorpusStats& stats) {
  return {
      {"pair_count", stats.pair_count},
      {"per_filter_drops", stats.per_filter_drops},
      {"per_filter_fixes", stats.per_filter_fixes},
      {"drop_reasons", stats.drop_reasons},
      {"duplicate_count", stats.duplicate_count},
      {"source_tokens", stats.source_tokens},
      {"target_tokens", stats.target_tokens},
      {"invalid_utf8_replaced", stats.invalid_utf8_replaced},
  };
}

nlohmann::json to_json(const StageReport& stage) {
  return {
      {"stage", stage.name},
      {"input_count", stage.input_count},
      {"output", to_json(stage.output)},
      {"seconds", stage.seconds},
      {"reconciles", stage.reconciles()},
      {"input_hashes", stage.input_hashes},
      {"output_hashes", stage.output_hashes},
  };
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : report.stages) stages.push_back(to_json(s));
  return {{"stages", stages}, {"config", report.config}};
}

std::string format_table(const RunReport& report) {
  std::string out = fmt::format("{:<28} {:>12} {:>12} {:>10} {:>10} {:>8}\n", "Stage", "#Pairs in", "#Pairs out",
                                "Dropped", "Dups", "Secs");
  out += std::string(85, '-') + "\n";
  for (const auto& s : report.stages) {
    out += fmt::format("{:<28} {:>12} {:>12} {:>10} {:>10} {:>8.2f}\n", s.name, s.input_count, s.output.pair_count,
                       s.output.total_drops(), s.output.duplicate_count, s.seconds);
    for (const auto& [reason, count] : s.output.drop_reasons)
      out += fmt::format("  {:<26} {:>12}\n", "drop: " + reason, count);
    for (const auto& [filter, count] : s.output.per_filter_fixes)
      out += fmt::format("  {:<26} {:>12}\n", "fixed: " + filter, count);
  }
  return out;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << value.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace bitext
