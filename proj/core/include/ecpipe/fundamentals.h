#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecpipe/date.h"

namespace ecpipe {

// One row of fundamentals.csv:
//   ticker,date,actual_sales,estimated_sales,actual_eps,estimated_eps
// Empty numeric fields are read as missing.
struct FundamentalsRecord {
  std::string ticker;
  Date date;
  std::optional<double> actual_sales;
  std::optional<double> estimated_sales;
  std::optional<double> actual_eps;
  std::optional<double> estimated_eps;

  bool complete() const {
    return actual_sales && estimated_sales && actual_eps && estimated_eps;
  }
};

inline constexpr int kFundamentalsJoinDays = 3;
inline constexpr double kBeatMissEpsilon = 1e-9;

// Sorted by (ticker, date). Throws kSchemaViolation, kParseError.
std::vector<FundamentalsRecord> parse_fundamentals_csv(std::string_view text);
std::vector<FundamentalsRecord> load_fundamentals(const std::string& path);

// Record of `ticker` whose date is nearest the call date, at most `max_days`
// away; on equal distance the earlier record wins.
std::optional<FundamentalsRecord> match_fundamentals(
    std::span<const FundamentalsRecord> records, std::string_view ticker,
    Date call_date, int max_days = kFundamentalsJoinDays);

// (actual - estimated) / |estimated|; nullopt when either side is missing or
// |estimated| < epsilon.
std::optional<double> beat_miss_factor(std::optional<double> actual,
                                       std::optional<double> estimated,
                                       double epsilon = kBeatMissEpsilon);

}  // namespace ecpipe
