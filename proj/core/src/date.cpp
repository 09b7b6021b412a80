#include "resvol/date.hpp"

#include <cctype>
#include <cstdio>

#include "resvol/error.hpp"

namespace resvol {

using namespace std::chrono;

namespace {

bool all_digits(std::string_view s) {
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return !s.empty();
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !all_digits(text.substr(0, 4)) ||
        !all_digits(text.substr(5, 2)) || !all_digits(text.substr(8, 2))) {
        throw ParseError(0, "invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    Date d{year{to_int(text.substr(0, 4))}, month{static_cast<unsigned>(to_int(text.substr(5, 2)))},
           day{static_cast<unsigned>(to_int(text.substr(8, 2)))}};
    if (!d.ok()) throw ParseError(0, "invalid calendar date '" + std::string(text) + "'");
    return d;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

int year_of(const Date& d) { return static_cast<int>(d.year()); }

int days_in_year(int y) { return year{y}.is_leap() ? 366 : 365; }

int day_of_year(const Date& d) {
    const sys_days jan1 = year_month_day{d.year(), January, day{1}};
    return static_cast<int>((sys_days{d} - jan1).count());
}

long days_since_epoch(const Date& d) { return sys_days{d}.time_since_epoch().count(); }

Date date_from_epoch_days(long days) { return Date{sys_days{std::chrono::days{days}}}; }

}  // namespace resvol
