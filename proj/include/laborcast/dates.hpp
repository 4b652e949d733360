#pragma once

#include <compare>
#include <string>

namespace laborcast {

/// Month-resolution timestamp. Input files carry a day of month, but the
/// panel is monthly, so everything downstream works on (year, month).
struct DateStamp {
    int year = 0;
    int month = 1; // 1..12

    auto operator<=>(const DateStamp&) const = default;

    /// Months since year 0; consecutive months differ by exactly 1.
    long long month_index() const { return static_cast<long long>(year) * 12 + (month - 1); }

    DateStamp next() const {
        return month == 12 ? DateStamp{year + 1, 1} : DateStamp{year, month + 1};
    }

    /// "YYYY-MM", zero padded.
    std::string to_string() const;

    /// Last day of this month (Gregorian leap rule).
    int last_day() const;
};

} // namespace laborcast
