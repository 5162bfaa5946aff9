#pragma once

#include <cstdint>
#include <string>

namespace dimpc {

// Timestamps are integer hours since the Unix epoch, UTC only. The CSV and
// report formats use ISO-8601 with a trailing 'Z' and zero minutes/seconds.

struct CivilDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;   // 0..23
};

int64_t hours_from_civil(const CivilDate& c);
CivilDate civil_from_hours(int64_t hours_since_epoch);

// "2024-01-31T17:00:00Z" -> epoch hour. Throws parse_error on malformed
// input or a timestamp not on the top of an hour.
int64_t parse_iso_hour(const std::string& text);

std::string format_iso_hour(int64_t hours_since_epoch);

// "2024-01" bucket label used by the monthly summary.
std::string format_month(int64_t hours_since_epoch);

}  // namespace dimpc
