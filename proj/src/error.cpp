#include "gasdiff/error.hpp"

#include <fmt/format.h>

namespace gasdiff {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::Io: return "io";
    case ParseErrorKind::MissingSection: return "missing-section";
    case ParseErrorKind::UnknownColumns: return "unknown-columns";
    case ParseErrorKind::NonNumeric: return "non-numeric";
    case ParseErrorKind::UnknownType: return "unknown-type";
    case ParseErrorKind::Truncated: return "truncated";
    case ParseErrorKind::MalformedHeader: return "malformed-header";
    case ParseErrorKind::CountMismatch: return "count-mismatch";
    case ParseErrorKind::Unsupported: return "unsupported";
  }
  return "unknown";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t line, const std::string& what)
    : InputError(line > 0 ? fmt::format("line {}: {} ({})", line, what, to_string(kind))
                          : fmt::format("{} ({})", what, to_string(kind))),
      kind_(kind),
      line_(line) {}

}  // namespace gasdiff
