/**
 * @file text.hpp
 * @brief Small string and number-formatting helpers used by readers and writers.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hazcell {

bool iequals(std::string_view a, std::string_view b) noexcept;
std::string_view trim(std::string_view s) noexcept;

/// Splits on `sep` without quote handling (none of the supported CSV layouts quote fields).
std::vector<std::string_view> split(std::string_view s, char sep);

/// Strict full-field parse; empty optional on any trailing garbage.
std::optional<double> parse_double(std::string_view s) noexcept;
std::optional<std::int64_t> parse_int(std::string_view s) noexcept;

/// Shortest decimal representation that parses back to the same double.
std::string format_number(double v);

/// Exactly two decimals, half away from zero ("16666.50").
std::string format_usd(double usd);
std::string format_cents(std::int64_t cents);
std::int64_t to_cents(double usd) noexcept;

}  // namespace hazcell
