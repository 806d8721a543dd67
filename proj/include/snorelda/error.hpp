#pragma once

#include <stdexcept>
#include <string>

namespace snore {

enum class ErrorKind {
  Io,
  Decode,
  EmptyInput,
  Validation,
  InsufficientData,
  UnderpopulatedClass,
  DegenerateData,
  SchemaMismatch,
  Leakage,
  Usage,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (notably the
/// CLI) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace snore
