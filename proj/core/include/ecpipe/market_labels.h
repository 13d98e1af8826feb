#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecpipe/date.h"

namespace ecpipe {

struct PricePoint {
  Date date;
  double close;
};

// Closing prices of one stock or index on its trading days. A day is a
// business day exactly when it appears in the series, so exchange holidays
// need no calendar.
class PriceSeries {
 public:
  // Throws kSchemaViolation unless dates are strictly increasing and every
  // close is finite and positive.
  PriceSeries(std::string symbol, std::vector<PricePoint> observations);

  const std::string& symbol() const { return symbol_; }
  const std::vector<PricePoint>& observations() const { return observations_; }
  std::size_t size() const { return observations_.size(); }
  bool empty() const { return observations_.empty(); }

  // Close on exactly `d`, if `d` is a trading day.
  std::optional<double> close_on(Date d) const;

  // Same dates, closes multiplied by `factor` (> 0).
  PriceSeries scaled(double factor) const;

 private:
  std::string symbol_;
  std::vector<PricePoint> observations_;
};

// Reads `symbol,date,close` rows and groups them by symbol. Rows for one
// symbol may come in any order; duplicate (symbol, date) is kSchemaViolation.
std::map<std::string, PriceSeries> load_price_csv(const std::string& path);
std::map<std::string, PriceSeries> parse_price_csv(std::string text);

enum class Direction { kPrev, kNext };

inline constexpr int kDefaultMaxGapDays = 7;
inline constexpr double kDefaultShockTau = 0.05;
inline constexpr int kPerfDays = 5;

// Nearest trading day strictly before/after `d`. Throws kNoNeighbor when none
// exists within `max_gap_days` calendar days.
Date business_neighbor(const PriceSeries& series, Date d, Direction direction,
                       int max_gap_days = kDefaultMaxGapDays);

// 1 iff close(d+1) > close(d-1); ties fall to 0.
// Throws kMissingPrice when either neighbor is unavailable.
int compute_vbl(const PriceSeries& series, Date d,
                int max_gap_days = kDefaultMaxGapDays);

// 1 on a rise of at least tau, 0 on a fall of at least tau, nullopt between.
// Throws kInvalidTau for tau <= 0, kMissingPrice like compute_vbl.
std::optional<int> compute_sbl(const PriceSeries& series, Date d, double tau,
                               int max_gap_days = kDefaultMaxGapDays);

// (S_d - S_prev) / S_prev where `d` must itself be a trading day.
double rate_of_increase(const PriceSeries& series, Date d,
                        int max_gap_days = kDefaultMaxGapDays);

// Outperformance flags for the five stock trading days after an event.
class PerfVector {
 public:
  PerfVector() = default;
  // Throws kSchemaViolation if any entry is not 0 or 1.
  explicit PerfVector(std::array<std::uint8_t, kPerfDays> entries);

  std::uint8_t operator[](std::size_t i) const { return entries_[i]; }
  const std::array<std::uint8_t, kPerfDays>& entries() const { return entries_; }
  int ones() const;

  friend bool operator==(const PerfVector&, const PerfVector&) = default;

 private:
  std::array<std::uint8_t, kPerfDays> entries_{};
};

// Entry i is 1 iff the stock's rate of increase beats the index's on the
// i-th trading day after `d`. Trading days come from the stock series and
// must also be present in the index. Throws kMissingPrice otherwise.
PerfVector perf_vector(const PriceSeries& stock, const PriceSeries& index,
                       Date d, int max_gap_days = kDefaultMaxGapDays);

// 1 with >= k ones, 0 with >= k zeros, nullopt otherwise. k in {3,4,5}
// or kInvalidK.
std::optional<int> compute_ibl(const PerfVector& v, int k);

// Which of the three label functions to apply, with its parameter.
struct LabelKind {
  enum class Kind { kValue, kShock, kIndex };
  Kind kind = Kind::kValue;
  double tau = kDefaultShockTau;  // shock only
  int k = 5;                      // index only

  static LabelKind value() { return {}; }
  static LabelKind shock(double tau = kDefaultShockTau) {
    return {Kind::kShock, tau, 5};
  }
  static LabelKind index(int k) { return {Kind::kIndex, kDefaultShockTau, k}; }

  bool needs_index() const { return kind == Kind::kIndex; }
  // "VBL", "SBL(0.05)", "IBL(5)".
  std::string name() const;
  // Inverse of name(); also accepts "vbl", "sbl", "ibl3".."ibl5".
  static LabelKind parse(const std::string& text);
};

// Applies `kind`; nullopt when the label is undefined (SBL/IBL partiality).
// Missing data surfaces as Error(kMissingPrice / kNoNeighbor).
std::optional<int> compute_label(const LabelKind& kind,
                                 const PriceSeries& stock,
                                 const PriceSeries* index, Date d,
                                 int max_gap_days = kDefaultMaxGapDays);

}  // namespace ecpipe
