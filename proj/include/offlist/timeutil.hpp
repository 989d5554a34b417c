#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace offlist {

using Timestamp = std::chrono::sys_seconds;

// Accepts `YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)`; the result is UTC.
// Throws InputError on anything else.
Timestamp parse_rfc3339(std::string_view text);

// Always renders as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_rfc3339(Timestamp t);

// RFC 5322 `Date:` header value, including the obsolete forms that are still
// common in list archives (two-digit years, named zones, trailing comments).
// A missing zone is taken as UTC.
std::optional<Timestamp> parse_mail_date(std::string_view text);

// Whole days from `from` to `to`, rounded toward negative infinity.
long long floor_days_between(Timestamp from, Timestamp to);

}  // namespace offlist
