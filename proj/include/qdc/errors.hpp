#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qdc {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid parameter values, ill-formed requests, violated preconditions.
/// Maps to CLI exit code 2.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Configuration text that cannot be parsed; carries the offending key and
/// 1-based line number.
class ParseError : public ValidationError {
 public:
  ParseError(std::string key, int line, const std::string& what)
      : ValidationError("config line " + std::to_string(line) + ", key \"" + key + "\": " + what),
        key_(std::move(key)),
        line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Malformed tag file; carries the byte offset where decoding failed.
class FormatError : public ValidationError {
 public:
  FormatError(std::uint64_t byte_offset, const std::string& what)
      : ValidationError("tag file byte " + std::to_string(byte_offset) + ": " + what),
        byte_offset_(byte_offset) {}

  std::uint64_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

/// An estimator or pipeline step failed on otherwise well-formed input
/// (insufficient data, undefined estimate, incomplete report).
/// Maps to CLI exit code 3.
class AnalysisError : public Error {
 public:
  explicit AnalysisError(const std::string& what) : Error(what) {}
};

/// Nonlinear fit did not converge or lacked usable data; carries diagnostics.
class FitError : public AnalysisError {
 public:
  FitError(const std::string& what, std::string diagnostics)
      : AnalysisError(what + " [" + diagnostics + "]"), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace qdc
