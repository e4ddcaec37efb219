#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace bikeclust {

/// A calendar date in the data's local timezone. No timezone conversion is ever applied.
class Date {
public:
    Date() = default;
    Date(int year, unsigned month, unsigned day);
    explicit Date(std::chrono::sys_days days);

    /// Parses `YYYY-MM-DD`. Throws bikeclust::Error on malformed or impossible dates.
    static Date parse(std::string_view text);

    /// Parses `YYYY-MM-DD HH:MM:SS` (or with a `T` separator) and keeps the date part.
    static Date parse_timestamp(std::string_view text);

    int year() const { return static_cast<int>(ymd_.year()); }
    unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
    unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

    /// 0 = Sunday ... 6 = Saturday.
    unsigned weekday() const;

    std::chrono::sys_days days() const { return std::chrono::sys_days{ymd_}; }
    Date plus_days(int n) const;

    std::string to_string() const;

    friend bool operator==(const Date& a, const Date& b) { return a.ymd_ == b.ymd_; }
    friend std::strong_ordering operator<=>(const Date& a, const Date& b) {
        return a.days().time_since_epoch().count() <=> b.days().time_since_epoch().count();
    }

private:
    std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                     std::chrono::day{1}};
};

}  // namespace bikeclust
