#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cosmo {

// Milliseconds since the Unix epoch, UTC.
using TimestampMs = std::int64_t;

// ISO 8601 date-time: "2011-10-01T08:45:13.917+02:00", "...Z", a space
// instead of 'T', or no offset (treated as UTC). Returns nullopt on failure.
std::optional<TimestampMs> parse_iso8601(std::string_view text);

// strptime-style pattern (as understood by std::get_time), optionally
// followed by fractional seconds in the input. Special patterns:
// "iso8601", "unix_s", "unix_ms".
std::optional<TimestampMs> parse_timestamp(std::string_view text, const std::string& format);

std::string format_iso8601(TimestampMs ms);

} // namespace cosmo
