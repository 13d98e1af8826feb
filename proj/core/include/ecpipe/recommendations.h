#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecpipe/date.h"

namespace ecpipe {

enum class Rating { kStrongBuy, kModerateBuy, kHold, kModerateSell, kStrongSell };

inline constexpr Rating kAllRatings[] = {Rating::kStrongBuy, Rating::kModerateBuy,
                                         Rating::kHold, Rating::kModerateSell,
                                         Rating::kStrongSell};

// Canonical spelling: strong_buy, moderate_buy, hold, moderate_sell, strong_sell.
std::string_view rating_name(Rating rating);
// Case-insensitive; spaces, hyphens and underscores are interchangeable.
// Throws kParseError.
Rating parse_rating(std::string_view text);

struct RecommendationRecord {
  std::string ticker;
  Date date;
  Rating rating = Rating::kHold;
};

// recommendations.csv with header `ticker,date,rating`. Rows come back sorted
// by (ticker, date) with file order kept among equal keys.
std::vector<RecommendationRecord> parse_recommendations_csv(std::string_view text);
std::vector<RecommendationRecord> load_recommendations(const std::string& path);

enum class MarWindow {
  kPrior1m,  // (call - 1 month, call)
  kPost5d,   // (call, call + 5 days]
};

std::string_view mar_window_name(MarWindow window);

enum class TieRule { kMostRecent, kMissing };

// Plurality rating among the ticker's records inside the window, or nullopt
// when the window is empty. Among tied ratings the one with the latest record
// wins (kMostRecent) or the result is missing (kMissing); a tie on both count
// and latest date resolves to missing as well.
std::optional<Rating> compute_mar(std::span<const RecommendationRecord> records,
                                  std::string_view ticker, Date call_date,
                                  MarWindow window,
                                  TieRule tie_rule = TieRule::kMostRecent);

}  // namespace ecpipe
