#include "time_util.hpp"

#include <cstdio>

#include "errors.hpp"

namespace dimpc {

namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yr = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

int read_int(const std::string& s, size_t pos, size_t len) {
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        if (!is_digit(s[i])) return -1;
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

}  // namespace

int64_t hours_from_civil(const CivilDate& c) {
    return days_from_civil(c.year, c.month, c.day) * 24 + c.hour;
}

CivilDate civil_from_hours(int64_t hours) {
    int64_t days = hours / 24;
    int64_t hod = hours % 24;
    if (hod < 0) {
        hod += 24;
        days -= 1;
    }
    CivilDate c;
    civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<int>(hod);
    return c;
}

int64_t parse_iso_hour(const std::string& text) {
    // Accepted shape: YYYY-MM-DDTHH:MM:SSZ ('T' may be a space, seconds
    // optional). Anything else, or minutes/seconds != 0, is rejected.
    const std::string& s = text;
    auto fail = [&](const std::string& why) -> int64_t {
        throw parse_error("bad timestamp '" + text + "': " + why);
    };
    if (s.size() < 16) fail("too short");
    if (s[4] != '-' || s[7] != '-') fail("expected YYYY-MM-DD");
    if (s[10] != 'T' && s[10] != ' ') fail("expected 'T' date/time separator");
    if (s[13] != ':') fail("expected HH:MM");
    const int year = read_int(s, 0, 4);
    const int month = read_int(s, 5, 2);
    const int day = read_int(s, 8, 2);
    const int hour = read_int(s, 11, 2);
    const int minute = read_int(s, 14, 2);
    if (year < 0 || month < 0 || day < 0 || hour < 0 || minute < 0) fail("non-numeric field");
    size_t pos = 16;
    int second = 0;
    if (pos < s.size() && s[pos] == ':') {
        if (pos + 3 > s.size()) fail("truncated seconds");
        second = read_int(s, pos + 1, 2);
        if (second < 0) fail("non-numeric seconds");
        pos += 3;
    }
    if (pos >= s.size() || s[pos] != 'Z') fail("expected trailing 'Z' (UTC only)");
    if (pos + 1 != s.size()) fail("trailing characters");
    if (month < 1 || month > 12) fail("month out of range");
    if (day < 1 || day > 31) fail("day out of range");
    if (hour > 23) fail("hour out of range");
    if (minute != 0 || second != 0) fail("not on the top of an hour");
    CivilDate c{year, month, day, hour};
    const int64_t h = hours_from_civil(c);
    // round-trip guard catches invalid days such as Feb 30
    const CivilDate back = civil_from_hours(h);
    if (back.year != year || back.month != month || back.day != day) fail("invalid calendar day");
    return h;
}

std::string format_iso_hour(int64_t hours) {
    const CivilDate c = civil_from_hours(hours);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:00:00Z", c.year, c.month, c.day, c.hour);
    return buf;
}

std::string format_month(int64_t hours) {
    const CivilDate c = civil_from_hours(hours);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", c.year, c.month);
    return buf;
}

}  // namespace dimpc
