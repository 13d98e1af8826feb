#include "ecpipe/recommendations.h"

#include <algorithm>
#include <array>

#include "ecpipe/csv.h"
#include "ecpipe/error.h"

namespace ecpipe {

std::string_view rating_name(Rating rating) {
  switch (rating) {
    case Rating::kStrongBuy: return "strong_buy";
    case Rating::kModerateBuy: return "moderate_buy";
    case Rating::kHold: return "hold";
    case Rating::kModerateSell: return "moderate_sell";
    case Rating::kStrongSell: return "strong_sell";
  }
  return "unknown";
}

Rating parse_rating(std::string_view text) {
  std::string key;
  bool pending_sep = false;
  for (char c : trim(text)) {
    if (c == ' ' || c == '_' || c == '-') {
      pending_sep = !key.empty();
      continue;
    }
    if (pending_sep) key.push_back('_');
    pending_sep = false;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (Rating r : kAllRatings)
    if (rating_name(r) == key) return r;
  throw Error(ErrorCode::kParseError, "unknown rating '" + std::string(text) + "'");
}

std::vector<RecommendationRecord> parse_recommendations_csv(std::string_view text) {
  auto reader = CsvReader::from_string(std::string(text));
  reader.expect_header({"ticker", "date", "rating"});
  std::vector<RecommendationRecord> out;
  while (auto fields = reader.next()) {
    if (fields->size() != 3) {
      throw Error(ErrorCode::kSchemaViolation,
                  "line " + std::to_string(reader.line()) + ": expected 3 fields");
    }
    try {
      RecommendationRecord r;
      r.ticker = trim((*fields)[0]);
      if (r.ticker.empty()) throw Error(ErrorCode::kParseError, "empty ticker");
      r.date = parse_date(trim((*fields)[1]));
      r.rating = parse_rating((*fields)[2]);
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

std::vector<RecommendationRecord> load_recommendations(const std::string& path) {
  return parse_recommendations_csv(read_file(path));
}

std::string_view mar_window_name(MarWindow window) {
  return window == MarWindow::kPrior1m ? "MAR_1m" : "MAR_5d";
}

std::optional<Rating> compute_mar(std::span<const RecommendationRecord> records,
                                  std::string_view ticker, Date call_date,
                                  MarWindow window, TieRule tie_rule) {
  std::array<int, 5> counts{};
  std::array<std::optional<Date>, 5> latest{};
  const Date lo = window == MarWindow::kPrior1m ? add_months(call_date, -1) : call_date;
  const Date hi = window == MarWindow::kPrior1m ? call_date
                                                 : call_date + std::chrono::days(5);
  for (const auto& r : records) {
    if (r.ticker != ticker) continue;
    const bool inside = window == MarWindow::kPrior1m ? (r.date > lo && r.date < hi)
                                                      : (r.date > lo && r.date <= hi);
    if (!inside) continue;
    const auto k = static_cast<std::size_t>(r.rating);
    ++counts[k];
    if (!latest[k] || r.date > *latest[k]) latest[k] = r.date;
  }
  const int top = *std::max_element(counts.begin(), counts.end());
  if (top == 0) return std::nullopt;
  std::vector<std::size_t> tied;
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k] == top) tied.push_back(k);
  if (tied.size() == 1) return static_cast<Rating>(tied[0]);
  if (tie_rule == TieRule::kMissing) return std::nullopt;
  std::optional<std::size_t> best;
  bool clash = false;
  for (std::size_t k : tied) {
    if (!best || *latest[k] > *latest[*best]) {
      best = k;
      clash = false;
    } else if (*latest[k] == *latest[*best]) {
      clash = true;
    }
  }
  if (clash) return std::nullopt;
  return static_cast<Rating>(*best);
}

}  // namespace ecpipe
