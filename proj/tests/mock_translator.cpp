// Stand-in translator for tests. Reads lines on stdin and answers per mode:
//
//   reverse         words of each line in reverse order
//   echo            each line unchanged
//   fail            message on stderr, exit status 1
//   short           drops the last line
//   sleep SECONDS   waits, then echoes
//   flaky FILE      "short" on the first call (FILE absent), then "reverse"
//   log FILE MODE   appends the argv tail to FILE, then runs MODE
//
// Any further arguments (decode parameters) are ignored.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

std::string reverse_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  std::string out;
  for (auto it = words.rbegin(); it != words.rend(); ++it) {
    if (!out.empty()) out.push_back(' ');
    out += *it;
  }
  return out;
}

std::vector<std::string> read_all() {
  std::vector<std::string> lines;
  for (std::string line; std::getline(std::cin, line);) lines.push_back(line);
  return lines;
}

int run(const std::string& mode, int argc, char** argv, int first) {
  if (mode == "fail") {
    std::cerr << "mock translator: model not found\n";
    return 1;
  }
  if (mode == "sleep") {
    const double s = first < argc ? std::stod(argv[first]) : 1.0;
    std::this_thread::sleep_for(std::chrono::duration<double>(s));
  }
  auto lines = read_all();
  if (mode == "short" && !lines.empty()) lines.pop_back();
  if (mode == "flaky") {
    const std::string state = first < argc ? argv[first] : "flaky.state";
    if (!std::ifstream(state)) {
      std::ofstream(state) << "1\n";
      if (!lines.empty()) lines.pop_back();
    } else {
      for (auto& l : lines) l = reverse_words(l);
    }
  }
  if (mode == "reverse")
    for (auto& l : lines) l = reverse_words(l);
  for (const auto& l : lines) std::cout << l << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  if (argc < 2) {
    std::cerr << "usage: mock_translator MODE [ARGS...]\n";
    return 2;
  }
  std::string mode = argv[1];
  if (mode == "log") {
    if (argc < 4) return 2;
    std::ofstream log(argv[2], std::ios::app);
    for (int i = 3; i < argc; ++i) log << (i > 3 ? " " : "") << argv[i];
    log << '\n';
    return run(argv[3], argc, argv, 4);
  }
  return run(mode, argc, argv, 2);
}
