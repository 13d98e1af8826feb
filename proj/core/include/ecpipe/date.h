#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace ecpipe {

// Calendar day. Arithmetic in whole days is plain `date + std::chrono::days{n}`.
using Date = std::chrono::sys_days;

// Parses strict ISO-8601 `YYYY-MM-DD`. Throws Error(kParseError).
Date parse_date(std::string_view text);
std::string format_date(Date date);

int year_of(Date date);
int month_of(Date date);

// Same day-of-month `months` later (negative for earlier), clamped to the last
// day of the target month: 2015-03-31 minus one month is 2015-02-28.
Date add_months(Date date, int months);

inline long days_between(Date from, Date to) {
  return static_cast<long>((to - from).count());
}

}  // namespace ecpipe
