#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace asyncavg {

/// Parses a decimal ("0.25", "-1e-3") or rational ("5/12") literal.
/// Returns nullopt on malformed input or a zero denominator.
std::optional<double> parse_real(std::string_view text);

/// Fixed 17-significant-digit rendering; round-trips every double exactly.
std::string format_real(double value);

} // namespace asyncavg
