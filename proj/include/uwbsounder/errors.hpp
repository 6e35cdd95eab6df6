#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uwbs {

enum class ErrorCategory {
  configuration,
  validation,
  io,
  format,
  truncated_stream,
  scheduling,
  degenerate_waveform,
};

constexpr std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::configuration: return "configuration";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::io: return "io";
    case ErrorCategory::format: return "format";
    case ErrorCategory::truncated_stream: return "truncated_stream";
    case ErrorCategory::scheduling: return "scheduling";
    case ErrorCategory::degenerate_waveform: return "degenerate_waveform";
  }
  return "unknown";
}

// Process exit status used by the CLI for each category. 0 is success and
// 1/2 are left to the argument parser.
constexpr int exit_code(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::configuration: return 3;
    case ErrorCategory::validation: return 4;
    case ErrorCategory::io: return 5;
    case ErrorCategory::format: return 6;
    case ErrorCategory::truncated_stream: return 7;
    case ErrorCategory::scheduling: return 8;
    case ErrorCategory::degenerate_waveform: return 9;
  }
  return 1;
}

class SounderError : public std::runtime_error {
 public:
  SounderError(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public SounderError {
 public:
  explicit ConfigError(const std::string& what)
      : SounderError(ErrorCategory::configuration, what) {}
};

class ValidationError : public SounderError {
 public:
  explicit ValidationError(const std::string& what)
      : SounderError(ErrorCategory::validation, what) {}
};

class IoError : public SounderError {
 public:
  explicit IoError(const std::string& what) : SounderError(ErrorCategory::io, what) {}
};

class FormatError : public SounderError {
 public:
  explicit FormatError(const std::string& what)
      : SounderError(ErrorCategory::format, what) {}
};

class SchedulingError : public SounderError {
 public:
  explicit SchedulingError(const std::string& what)
      : SounderError(ErrorCategory::scheduling, what) {}
};

class DegenerateWaveformError : public SounderError {
 public:
  explicit DegenerateWaveformError(const std::string& what)
      : SounderError(ErrorCategory::degenerate_waveform, what) {}
};

/// Raised when a sample stream ends before the averager has seen P + M*L samples.
class TruncatedStreamError : public SounderError {
 public:
  TruncatedStreamError(std::size_t available, std::size_t required,
                       std::optional<std::uint64_t> snapshot = std::nullopt)
      : SounderError(ErrorCategory::truncated_stream,
                     message(available, required, snapshot)),
        available_(available),
        required_(required),
        snapshot_(snapshot) {}

  std::size_t available() const noexcept { return available_; }
  std::size_t required() const noexcept { return required_; }
  std::optional<std::uint64_t> snapshot_index() const noexcept { return snapshot_; }

 private:
  static std::string message(std::size_t available, std::size_t required,
                             std::optional<std::uint64_t> snapshot) {
    std::string msg = "truncated stream: " + std::to_string(available) +
                      " samples available, " + std::to_string(required) + " required";
    if (snapshot) msg += " (snapshot " + std::to_string(*snapshot) + ")";
    return msg;
  }

  std::size_t available_;
  std::size_t required_;
  std::optional<std::uint64_t> snapshot_;
};

}  // namespace uwbs
