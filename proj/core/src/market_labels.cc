#include "ecpipe/market_labels.h"

#include <algorithm>
#include <cmath>

#include "ecpipe/csv.h"
#include "ecpipe/error.h"

namespace ecpipe {

PriceSeries::PriceSeries(std::string symbol,
                         std::vector<PricePoint> observations)
    : symbol_(std::move(symbol)), observations_(std::move(observations)) {
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    const auto& p = observations_[i];
    if (!std::isfinite(p.close) || p.close <= 0.0) {
      throw Error(ErrorCode::kSchemaViolation,
                  symbol_ + ": non-positive close on " + format_date(p.date));
    }
    if (i > 0 && !(observations_[i - 1].date < p.date)) {
      throw Error(ErrorCode::kSchemaViolation,
                  symbol_ + ": dates not strictly increasing at " +
                      format_date(p.date));
    }
  }
}

std::optional<double> PriceSeries::close_on(Date d) const {
  auto it = std::lower_bound(
      observations_.begin(), observations_.end(), d,
      [](const PricePoint& p, Date x) { return p.date < x; });
  if (it == observations_.end() || it->date != d) return std::nullopt;
  return it->close;
}

PriceSeries PriceSeries::scaled(double factor) const {
  std::vector<PricePoint> obs = observations_;
  for (auto& p : obs) p.close *= factor;
  return PriceSeries(symbol_, std::move(obs));
}

std::map<std::string, PriceSeries> parse_price_csv(std::string text) {
  CsvReader reader = CsvReader::from_string(std::move(text));
  reader.expect_header({"symbol", "date", "close"});
  std::map<std::string, std::vector<PricePoint>> grouped;
  while (auto row = reader.next()) {
    const std::string where = "line " + std::to_string(reader.line());
    if (row->size() != 3) {
      throw Error(ErrorCode::kSchemaViolation, where + ": expected 3 fields");
    }
    const std::string symbol = trim((*row)[0]);
    if (symbol.empty()) {
      throw Error(ErrorCode::kSchemaViolation, where + ": empty symbol");
    }
    try {
      grouped[symbol].push_back(
          {parse_date(trim((*row)[1])), parse_double((*row)[2])});
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchemaViolation, where + ": " + e.what());
    }
  }
  std::map<std::string, PriceSeries> out;
  for (auto& [symbol, obs] : grouped) {
    std::stable_sort(obs.begin(), obs.end(),
                     [](const PricePoint& a, const PricePoint& b) {
                       return a.date < b.date;
                     });
    out.emplace(symbol, PriceSeries(symbol, std::move(obs)));
  }
  return out;
}

std::map<std::string, PriceSeries> load_price_csv(const std::string& path) {
  try {
    return parse_price_csv(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFileUnreadable) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

Date business_neighbor(const PriceSeries& series, Date d, Direction direction,
                       int max_gap_days) {
  const auto& obs = series.observations();
  if (obs.empty()) {
    throw Error(ErrorCode::kNoNeighbor, series.symbol() + ": empty series");
  }
  const auto less = [](const PricePoint& p, Date x) { return p.date < x; };
  std::optional<Date> found;
  if (direction == Direction::kNext) {
    auto it = std::upper_bound(
        obs.begin(), obs.end(), d,
        [](Date x, const PricePoint& p) { return x < p.date; });
    if (it != obs.end()) found = it->date;
  } else {
    auto it = std::lower_bound(obs.begin(), obs.end(), d, less);
    if (it != obs.begin()) found = std::prev(it)->date;
  }
  if (!found || std::abs(days_between(d, *found)) > max_gap_days) {
    throw Error(ErrorCode::kNoNeighbor,
                series.symbol() + ": no " +
                    (direction == Direction::kNext ? "next" : "previous") +
                    " trading day within " + std::to_string(max_gap_days) +
                    " days of " + format_date(d));
  }
  return *found;
}

namespace {

struct Neighbors {
  double before;
  double after;
};

Neighbors neighbor_closes(const PriceSeries& series, Date d, int max_gap) {
  try {
    const Date prev = business_neighbor(series, d, Direction::kPrev, max_gap);
    const Date next = business_neighbor(series, d, Direction::kNext, max_gap);
    return {*series.close_on(prev), *series.close_on(next)};
  } catch (const Error& e) {
    throw Error(ErrorCode::kMissingPrice, e.what());
  }
}

}  // namespace

int compute_vbl(const PriceSeries& series, Date d, int max_gap_days) {
  const Neighbors n = neighbor_closes(series, d, max_gap_days);
  return n.after > n.before ? 1 : 0;
}

std::optional<int> compute_sbl(const PriceSeries& series, Date d, double tau,
                               int max_gap_days) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kInvalidTau,
                "tau must be positive, got " + format_number(tau));
  }
  const Neighbors n = neighbor_closes(series, d, max_gap_days);
  if ((n.after - n.before) / n.before >= tau) return 1;
  if ((n.before - n.after) / n.before >= tau) return 0;
  return std::nullopt;
}

double rate_of_increase(const PriceSeries& series, Date d, int max_gap_days) {
  const auto today = series.close_on(d);
  if (!today) {
    throw Error(ErrorCode::kMissingPrice,
                series.symbol() + ": no close on " + format_date(d));
  }
  Date prev;
  try {
    prev = business_neighbor(series, d, Direction::kPrev, max_gap_days);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMissingPrice, e.what());
  }
  const double before = *series.close_on(prev);
  return (*today - before) / before;
}

PerfVector::PerfVector(std::array<std::uint8_t, kPerfDays> entries)
    : entries_(entries) {
  for (auto e : entries_) {
    if (e > 1) throw Error(ErrorCode::kSchemaViolation, "perf entry not 0/1");
  }
}

int PerfVector::ones() const {
  int n = 0;
  for (auto e : entries_) n += e;
  return n;
}

PerfVector perf_vector(const PriceSeries& stock, const PriceSeries& index,
                       Date d, int max_gap_days) {
  std::array<std::uint8_t, kPerfDays> entries{};
  Date day = d;
  for (int i = 0; i < kPerfDays; ++i) {
    try {
      day = business_neighbor(stock, day, Direction::kNext, max_gap_days);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMissingPrice,
                  "fewer than 5 trading days after " + format_date(d) + ": " +
                      e.what());
    }
    const double stock_rate = rate_of_increase(stock, day, max_gap_days);
    const double index_rate = rate_of_increase(index, day, max_gap_days);
    entries[i] = stock_rate > index_rate ? 1 : 0;
  }
  return PerfVector(entries);
}

std::optional<int> compute_ibl(const PerfVector& v, int k) {
  if (k < 3 || k > 5) {
    throw Error(ErrorCode::kInvalidK,
                "k must be in {3,4,5}, got " + std::to_string(k));
  }
  const int ones = v.ones();
  if (ones >= k) return 1;
  if (kPerfDays - ones >= k) return 0;
  return std::nullopt;
}

std::string LabelKind::name() const {
  switch (kind) {
    case Kind::kValue: return "VBL";
    case Kind::kShock: return "SBL(" + format_number(tau) + ")";
    case Kind::kIndex: return "IBL(" + std::to_string(k) + ")";
  }
  return "?";
}

LabelKind LabelKind::parse(const std::string& text) {
  const std::string t = to_lower(trim(text));
  if (t == "vbl" || t == "value") return value();
  if (t == "sbl" || t == "shock") return shock();
  auto inner = [&](std::size_t open) {
    const std::size_t close = t.find(')', open);
    if (close == std::string::npos || close != t.size() - 1) {
      throw Error(ErrorCode::kInvalidConfig, "bad label kind '" + text + "'");
    }
    return t.substr(open + 1, close - open - 1);
  };
  if (t.rfind("sbl(", 0) == 0) {
    const double tau = parse_double(inner(3));
    if (!(tau > 0.0)) {
      throw Error(ErrorCode::kInvalidTau, "tau must be positive in '" + text + "'");
    }
    return shock(tau);
  }
  int k = 0;
  if (t.rfind("ibl(", 0) == 0) {
    k = static_cast<int>(parse_long(inner(3)));
  } else if (t.size() == 4 && t.rfind("ibl", 0) == 0) {
    k = t[3] - '0';
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown label kind '" + text + "'");
  }
  if (k < 3 || k > 5) {
    throw Error(ErrorCode::kInvalidK, "k must be in {3,4,5} in '" + text + "'");
  }
  return index(k);
}

std::optional<int> compute_label(const LabelKind& kind,
                                 const PriceSeries& stock,
                                 const PriceSeries* index, Date d,
                                 int max_gap_days) {
  switch (kind.kind) {
    case LabelKind::Kind::kValue:
      return compute_vbl(stock, d, max_gap_days);
    case LabelKind::Kind::kShock:
      return compute_sbl(stock, d, kind.tau, max_gap_days);
    case LabelKind::Kind::kIndex:
      if (index == nullptr) {
        throw Error(ErrorCode::kMissingPrice, "no reference index series");
      }
      return compute_ibl(perf_vector(stock, *index, d, max_gap_days), kind.k);
  }
  return std::nullopt;
}

}  // namespace ecpipe
