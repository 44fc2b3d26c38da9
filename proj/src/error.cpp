#include "asyncavg/error.hpp"

namespace asyncavg {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::RowSumViolation: return "RowSumViolation";
    case ErrorKind::ColSumViolation: return "ColSumViolation";
    case ErrorKind::PatternMismatch: return "PatternMismatch";
    case ErrorKind::InvalidGraph: return "InvalidGraph";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::AssignmentPatternMismatch: return "AssignmentPatternMismatch";
    case ErrorKind::DelayOutOfRange: return "DelayOutOfRange";
    case ErrorKind::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorKind::NotConnected: return "NotConnected";
    case ErrorKind::NotErgodic: return "NotErgodic";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::HeaderMismatch: return "HeaderMismatch";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::size_t row, std::size_t col,
             double value)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      row_(row),
      col_(col),
      value_(value) {}

} // namespace asyncavg
