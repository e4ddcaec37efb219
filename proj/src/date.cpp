#include "bikeclust/date.hpp"

#include <charconv>
#include <cstdio>

#include "bikeclust/error.hpp"

namespace bikeclust {

namespace {

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    const char* first = text.data() + pos;
    const char* last = first + len;
    for (const char* p = first; p != last; ++p) {
        if (*p < '0' || *p > '9') return false;
    }
    return std::from_chars(first, last, out).ec == std::errc{};
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day)
    : ymd_{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}} {
    if (!ymd_.ok()) {
        throw Error("invalid calendar date " + std::to_string(year) + "-" + std::to_string(month) +
                    "-" + std::to_string(day));
    }
}

Date::Date(std::chrono::sys_days days) : ymd_{days} {}

Date Date::parse(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_fixed(text, 0, 4, y) ||
        !parse_fixed(text, 5, 2, m) || !parse_fixed(text, 8, 2, d)) {
        throw Error("unparseable date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    }
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw Error("invalid calendar date '" + std::string(text) + "'");
    return Date(std::chrono::sys_days{ymd});
}

Date Date::parse_timestamp(std::string_view text) {
    // YYYY-MM-DD HH:MM:SS, optionally followed by fractional seconds.
    if (text.size() < 19 || (text[10] != ' ' && text[10] != 'T') || text[13] != ':' ||
        text[16] != ':') {
        throw Error("unparseable timestamp '" + std::string(text) +
                    "' (expected YYYY-MM-DD HH:MM:SS)");
    }
    int hh = 0, mm = 0, ss = 0;
    if (!parse_fixed(text, 11, 2, hh) || !parse_fixed(text, 14, 2, mm) ||
        !parse_fixed(text, 17, 2, ss) || hh > 23 || mm > 59 || ss > 60) {
        throw Error("unparseable timestamp '" + std::string(text) + "'");
    }
    if (text.size() > 19 && text[19] != '.') {
        throw Error("unparseable timestamp '" + std::string(text) + "'");
    }
    try {
        return parse(text.substr(0, 10));
    } catch (const Error&) {
        throw Error("unparseable timestamp '" + std::string(text) + "'");
    }
}

unsigned Date::weekday() const { return std::chrono::weekday{days()}.c_encoding(); }

Date Date::plus_days(int n) const { return Date(days() + std::chrono::days{n}); }

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

}  // namespace bikeclust
