#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace bitext::proc {

struct RunResult {
  int exit_code = -1;   // valid when !signaled && !timed_out
  int signal = 0;
  bool signaled = false;
  bool timed_out = false;
  std::string out;
  std::string err;

  bool ok() const { return !signaled && !timed_out && exit_code == 0; }
};

// Runs `command` through /bin/sh -c, feeding `input` on stdin and collecting
// stdout and stderr. A zero timeout waits forever. On timeout the whole
// process group is killed.
RunResult run_shell(const std::string& command, std::string_view input, std::chrono::milliseconds timeout);

// Single-quotes a value for safe interpolation into a shell command.
std::string shell_quote(std::string_view value);

}  // namespace bitext::proc
