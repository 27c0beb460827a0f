#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmadapt {

/// Base class of every error raised by the library. `code()` is a stable
/// machine-readable tag used by the CLI and the HTTP service.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& message) : Error("input", message) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message) : Error("not-found", message) {}
};

/// A reference that does not resolve.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& message) : Error("integrity", message) {}
};

/// A reference that resolves to an element of the wrong kind.
class KindError : public Error {
 public:
  explicit KindError(const std::string& message) : Error("kind", message) {}
};

class BlockedDeleteError : public Error {
 public:
  BlockedDeleteError(const std::string& message, std::vector<std::string> referrers)
      : Error("blocked-delete", message), referrers_(std::move(referrers)) {}

  const std::vector<std::string>& referrers() const noexcept { return referrers_; }

 private:
  std::vector<std::string> referrers_;
};

class StaleError : public Error {
 public:
  explicit StaleError(const std::string& message) : Error("stale", message) {}
};

class TaskStateError : public Error {
 public:
  explicit TaskStateError(const std::string& message) : Error("task-state", message) {}
};

class ReplayError : public Error {
 public:
  ReplayError(std::size_t step, const std::string& message)
      : Error("replay", "replay failed at step " + std::to_string(step) + ": " + message),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message) : Error("schema", message) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("parse", message), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A loaded model breaks a structural rule; `details()` lists the violations.
class StructuralError : public Error {
 public:
  StructuralError(const std::string& message, std::vector<std::string> details)
      : Error("structural", message), details_(std::move(details)) {}

  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  std::vector<std::string> details_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

}  // namespace qmadapt
