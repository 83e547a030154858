#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace shiftscope {

/// UTC instant with one second resolution.
using Timestamp = std::chrono::sys_seconds;
/// UTC calendar day.
using Date = std::chrono::sys_days;

/// Parses `YYYY-MM-DD`. Throws ParseError.
Date parse_date(std::string_view text);

/// Parses an ISO-8601 UTC instant: `YYYY-MM-DDTHH:MM:SS` followed by `Z`,
/// `+00:00` or nothing. Fractional seconds are truncated. Throws ParseError.
Timestamp parse_timestamp(std::string_view text);

std::string format_date(Date date);
std::string format_timestamp(Timestamp ts);

/// UTC calendar day containing `ts` (left-inclusive day boundaries).
inline Date day_of(Timestamp ts) {
    return std::chrono::floor<std::chrono::days>(ts);
}

} // namespace shiftscope
