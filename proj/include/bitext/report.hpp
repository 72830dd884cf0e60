#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bitext/corpus_io.hpp"

namespace bitext {

struct StageReport {
  std::string name;
  std::size_t input_count = 0;
  CorpusStats output;
  double seconds = 0.0;
  std::map<std::string, std::string> input_hashes;   // path -> sha256
  std::map<std::string, std::string> output_hashes;

  // input = output + drops + duplicates
  bool reconciles() const;
  void hash_inputs(const std::vector<std::filesystem::path>& paths);
  void hash_outputs(const std::vector<std::filesystem::path>& paths);
};

struct RunReport {
  std::vector<StageReport> stages;
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json to_json(const CorpusStats& stats);
nlohmann::json to_json(const StageReport& stage);
nlohmann::json to_json(const RunReport& report);

// Fixed-width table, one row per stage followed by its per-filter breakdown.
std::string format_table(const RunReport& report);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace bitext
