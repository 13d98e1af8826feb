#include "ecpipe/fundamentals.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ecpipe/csv.h"
#include "ecpipe/error.h"

namespace ecpipe {

namespace {

std::optional<double> optional_number(const std::string& field) {
  const std::string t = trim(field);
  if (t.empty() || to_lower(t) == "na" || to_lower(t) == "nan") return std::nullopt;
  return parse_double(t);
}

}  // namespace

std::vector<FundamentalsRecord> parse_fundamentals_csv(std::string_view text) {
  auto reader = CsvReader::from_string(std::string(text));
  reader.expect_header({"ticker", "date", "actual_sales", "estimated_sales", "actual_eps",
                        "estimated_eps"});
  std::vector<FundamentalsRecord> out;
  while (auto f = reader.next()) {
    try {
      if (f->size() != 6) throw Error(ErrorCode::kSchemaViolation, "expected 6 fields");
      FundamentalsRecord r;
      r.ticker = trim((*f)[0]);
      if (r.ticker.empty()) throw Error(ErrorCode::kParseError, "empty ticker");
      r.date = parse_date(trim((*f)[1]));
      r.actual_sales = optional_number((*f)[2]);
      r.estimated_sales = optional_number((*f)[3]);
      r.actual_eps = optional_number((*f)[4]);
      r.estimated_eps = optional_number((*f)[5]);
      out.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(reader.line()) + ": " + e.what());
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.ticker != b.ticker ? a.ticker < b.ticker : a.date < b.date;
  });
  return out;
}

std::vector<FundamentalsRecord> load_fundamentals(const std::string& path) {
  return parse_fundamentals_csv(read_file(path));
}

std::optional<FundamentalsRecord> match_fundamentals(
    std::span<const FundamentalsRecord> records, std::string_view ticker,
    Date call_date, int max_days) {
  const FundamentalsRecord* best = nullptr;
  long best_gap = 0;
  for (const auto& r : records) {
    if (r.ticker != ticker) continue;
    const long gap = std::labs(days_between(call_date, r.date));
    if (gap > max_days) continue;
    if (!best || gap < best_gap || (gap == best_gap && r.date < best->date)) {
      best = &r;
      best_gap = gap;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::optional<double> beat_miss_factor(std::optional<double> actual,
                                       std::optional<double> estimated, double epsilon) {
  if (!actual || !estimated || std::abs(*estimated) < epsilon) return std::nullopt;
  return (*actual - *estimated) / std::abs(*estimated);
}

}  // namespace ecpipe
