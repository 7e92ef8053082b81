#include "dermveil/error.hpp"

namespace dermveil {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidPolygon: return "invalid-polygon";
    case ErrorKind::EmptyMask: return "empty-mask";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Shortfall: return "shortfall";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace dermveil
