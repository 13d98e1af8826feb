#include "ecpipe/date.h"

#include <charconv>
#include <cstdio>

#include "ecpipe/error.h"

namespace ecpipe {

namespace {

int parse_fixed(std::string_view text, std::string_view whole) {
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw Error(ErrorCode::kParseError,
                  "bad date '" + std::string(whole) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorCode::kParseError,
                "bad date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  const int y = parse_fixed(text.substr(0, 4), text);
  const int m = parse_fixed(text.substr(5, 2), text);
  const int d = parse_fixed(text.substr(8, 2), text);
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::kParseError,
                "invalid calendar date '" + std::string(text) + "'");
  }
  return std::chrono::sys_days{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

int year_of(Date date) {
  return int(std::chrono::year_month_day{date}.year());
}

int month_of(Date date) {
  return int(unsigned(std::chrono::year_month_day{date}.month()));
}

Date add_months(Date date, int months) {
  const std::chrono::year_month_day ymd{date};
  const std::chrono::year_month_day shifted =
      ymd + std::chrono::months{months};
  if (shifted.ok()) return std::chrono::sys_days{shifted};
  const std::chrono::year_month_day_last last{
      shifted.year(), std::chrono::month_day_last{shifted.month()}};
  return std::chrono::sys_days{last};
}

}  // namespace ecpipe
