#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bitext/subprocess.hpp"
#include "bitext/types.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string data_path(std::string_view name);
std::string mock_translator();
std::string cli();

// Runs the bitext binary with `args` (already shell-quoted where needed).
bitext::proc::RunResult run_cli(const std::string& args, std::string_view input = {});

}  // namespace testing
