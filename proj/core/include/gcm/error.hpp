#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gcm {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Computation errors (pipeline stages). The CLI maps these to exit code 3.
// ---------------------------------------------------------------------------

class ComputeError : public Error {
 public:
  explicit ComputeError(std::string message)
      : Error(message), message_(std::move(message)) {}

  const char* what() const noexcept override { return full_.empty() ? message_.c_str() : full_.c_str(); }

  /// Pipeline stage that raised the error; empty outside run_pipeline.
  const std::string& stage() const noexcept { return stage_; }
  const std::string& message() const noexcept { return message_; }

  void set_stage(std::string stage) {
    stage_ = std::move(stage);
    full_ = "[" + stage_ + "] " + message_;
  }

 private:
  std::string message_;
  std::string stage_;
  std::string full_;
};

class DegenerateInput : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

class DegenerateMatrix : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

class MissingData : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

class ConstantColumn : public ComputeError {
 public:
  ConstantColumn(std::string indicator, const std::string& message)
      : ComputeError(message), indicator_(std::move(indicator)) {}
  const std::string& indicator() const noexcept { return indicator_; }

 private:
  std::string indicator_;
};

// ---------------------------------------------------------------------------
// Ingestion errors. The CLI maps these to exit code 2.
// ---------------------------------------------------------------------------

class IngestError : public Error {
 public:
  using Error::Error;
};

class FormatError : public IngestError {
 public:
  FormatError(std::size_t line, std::size_t column, const std::string& message)
      : IngestError("line " + std::to_string(line) +
                    (column ? ", column " + std::to_string(column) : std::string()) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  /// 1-based; 0 when the error concerns the whole line.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class EmptySelection : public IngestError {
 public:
  using IngestError::IngestError;
};

class MissingDataset : public IngestError {
 public:
  explicit MissingDataset(const std::string& code)
      : IngestError("dataset " + code + " yielded no observations"), code_(code) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class NetworkError : public IngestError {
 public:
  NetworkError(const std::string& code, const std::string& detail)
      : IngestError("network error fetching " + code + ": " + detail), code_(code) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class UpstreamError : public IngestError {
 public:
  UpstreamError(const std::string& code, int status)
      : IngestError("upstream returned HTTP " + std::to_string(status) + " for " + code),
        code_(code),
        status_(status) {}
  const std::string& code() const noexcept { return code_; }
  int status() const noexcept { return status_; }

 private:
  std::string code_;
  int status_;
};

class DecodeError : public IngestError {
 public:
  DecodeError(const std::string& code, const std::string& detail)
      : IngestError("cannot decode response for " + code + ": " + detail), code_(code) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Unreadable input file, unwritable cache, and similar I/O failures.
class IoError : public IngestError {
 public:
  using IngestError::IngestError;
};

// ---------------------------------------------------------------------------
// Configuration errors. The CLI maps these to exit code 1.
// ---------------------------------------------------------------------------

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcm
