#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tacsim {

enum class ErrorKind {
  Usage,
  Config,
  Schema,
  Io,
  Numerical,
  DegenerateContact,
  DegenerateFrame,
  Domain,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` lets callers map failures
/// onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace tacsim
