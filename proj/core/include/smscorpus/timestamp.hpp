#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace smscorpus {

/// Seconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t seconds = 0;

  auto operator<=>(const Timestamp&) const = default;

  static Timestamp now();
};

/// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS]` (or a space instead of `T`),
/// optionally followed by `Z` or a `+HH:MM`/`-HH:MM` offset. Fractional
/// seconds are accepted and truncated.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Canonical `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(Timestamp ts);

/// Proleptic Gregorian day count relative to 1970-01-01.
std::int64_t days_from_civil(std::int64_t year, unsigned month, unsigned day);

}  // namespace smscorpus
