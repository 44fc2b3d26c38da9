#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace asyncavg {

enum class ErrorKind {
    NotSquare,
    NegativeEntry,
    RowSumViolation,
    ColSumViolation,
    PatternMismatch,
    InvalidGraph,
    InvalidDistribution,
    AssignmentPatternMismatch,
    DelayOutOfRange,
    EnumerationTooLarge,
    NotConnected,
    NotErgodic,
    DimensionMismatch,
    InvalidConfig,
    ConfigParse,
    HeaderMismatch,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Domain error carrying a machine-checkable kind plus the offending
/// position/value where one exists (row, col, value are otherwise unset).
class Error : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Error(ErrorKind kind, const std::string& message, std::size_t row = npos,
          std::size_t col = npos, double value = 0.0);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] std::size_t col() const noexcept { return col_; }
    [[nodiscard]] double value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    std::size_t row_;
    std::size_t col_;
    double value_;
};

} // namespace asyncavg
