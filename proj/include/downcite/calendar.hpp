#pragma once

#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace downcite {

/// Calendar month with 1-based month numbering.
struct YearMonth {
    int year = 0;
    int month = 1; // 1..12

    friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

inline bool valid(YearMonth ym) { return ym.month >= 1 && ym.month <= 12; }

/// Linear month index; adjacent calendar months differ by 1.
inline int month_index(YearMonth ym) { return ym.year * 12 + (ym.month - 1); }

inline YearMonth from_month_index(int idx) {
    int year = idx / 12;
    int rem = idx % 12;
    if (rem < 0) {
        year -= 1;
        rem += 12;
    }
    return {year, rem + 1};
}

inline YearMonth add_months(YearMonth ym, int n) { return from_month_index(month_index(ym) + n); }

inline std::string to_string(YearMonth ym) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", ym.year, ym.month);
    return buf;
}

/// Parses "YYYY-MM".
inline YearMonth parse_year_month(const std::string& text) {
    int y = 0, m = 0;
    if (std::sscanf(text.c_str(), "%d-%d", &y, &m) != 2 || !valid({y, m}))
        throw std::invalid_argument("expected YYYY-MM, got '" + text + "'");
    return {y, m};
}

/// Inclusive calendar month range.
struct MonthWindow {
    YearMonth first;
    YearMonth last;

    friend auto operator<=>(const MonthWindow&, const MonthWindow&) = default;
};

inline int window_length(MonthWindow w) { return month_index(w.last) - month_index(w.first) + 1; }

inline bool contains(MonthWindow w, YearMonth ym) { return w.first <= ym && ym <= w.last; }

} // namespace downcite
