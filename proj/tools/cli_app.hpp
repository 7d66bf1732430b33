#pragma once

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace saext::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct Overrides {
  std::optional<std::string> output_path;
  std::optional<std::string> format;  // "csv" | "json"
  std::uint64_t seed = 0;
  int threads = 1;
};

struct Artifact {
  std::string format;
  std::string body;
  std::optional<std::string> path;  // stdout when empty
};

/// Parses and validates a config document and runs the command.
/// Throws ValidationError or saext::Error.
Artifact execute(const std::string& config_text, const Overrides& overrides);

struct ValidationError : std::exception {
  explicit ValidationError(std::string m) : message(std::move(m)) {}
  const char* what() const noexcept override { return message.c_str(); }
  std::string message;
};

/// Full command-line entry point; returns the process exit code.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Writes `body` to `path` through a temporary file in the same directory.
void write_atomically(const std::string& path, const std::string& body);

}  // namespace saext::cli
