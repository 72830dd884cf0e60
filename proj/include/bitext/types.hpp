#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bitext {

// Failures caused by the data being processed. The CLI maps these to exit 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures caused by configuration or usage. The CLI maps these to exit 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LineCountMismatch : public DataError {
 public:
  using DataError::DataError;
};

class Utf8Error : public DataError {
 public:
  using DataError::DataError;
};

class TsvArityError : public DataError {
 public:
  using DataError::DataError;
};

enum class Origin { authentic, synthetic };

struct MonoSentence {
  std::string text;
  std::size_t line_no = 1;
};

struct SentencePair {
  std::string source;
  std::string target;
  Origin origin = Origin::authentic;
  std::vector<std::string> tags;
  std::size_t line_no = 1;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

const char* to_string(Origin origin);

}  // namespace bitext
