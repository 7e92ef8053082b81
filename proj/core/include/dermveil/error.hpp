#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dermveil {

enum class ErrorKind {
  InvalidArgument,
  InvalidPolygon,
  EmptyMask,
  Degenerate,
  Schema,
  Shortfall,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `kind()` is stable and machine-readable; the
/// message names the offending field or value.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dermveil
