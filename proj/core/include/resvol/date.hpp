#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace resvol {

using Date = std::chrono::year_month_day;

// Strict ISO-8601 calendar date, "YYYY-MM-DD". Throws ParseError.
Date parse_date(std::string_view text);
std::string format_date(const Date& d);

int year_of(const Date& d);
int days_in_year(int year);
// 0-based ordinal day within the year.
int day_of_year(const Date& d);
// Days since 1970-01-01.
long days_since_epoch(const Date& d);
Date date_from_epoch_days(long days);

}  // namespace resvol
