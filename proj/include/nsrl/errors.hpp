#pragma once

#include <stdexcept>
#include <string>

namespace nsrl {

// Invalid configuration: bad dimensions, malformed experiment files,
// unknown tasks. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// NaN/Inf encountered where finite values are required. Maps to CLI
// exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// API misuse: stepping a finished episode, backward without forward.
class UsageError : public std::logic_error {
 public:
  explicit UsageError(const std::string& msg) : std::logic_error(msg) {}
};

// Layout sampling failed after bounded retries.
class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Rule-file syntax or vocabulary violation, with source position.
class RuleParseError : public std::runtime_error {
 public:
  RuleParseError(int line, int column, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(column) + ": " + msg),
        line(line),
        column(column) {}

  int line;
  int column;
};

}  // namespace nsrl
