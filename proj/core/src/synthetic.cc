#include "ecpipe/synthetic.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "ecpipe/csv.h"
#include "ecpipe/date.h"
#include "ecpipe/recommendations.h"
#include "ecpipe/rng.h"

namespace ecpipe {

namespace {

const std::vector<std::string> kFiller = {
    "the",      "we",       "our",      "quarter",  "revenue",  "margin",   "customers",
    "product",  "market",   "year",     "team",     "guidance", "business", "segment",
    "costs",    "pricing",  "demand",   "supply",   "capital",  "cash",     "flow",
    "operating", "expenses", "sales",   "outlook",  "investment", "portfolio", "region",
    "channel",  "inventory", "volume",  "mix",      "contract", "pipeline", "launch",
    "platform", "services", "balance",  "sheet",    "debt",     "share",    "buyback",
    "dividend", "question", "analyst",  "thank",    "you",      "and",      "to",
    "of",       "in",       "for",      "on",       "with",     "as",       "this",
    "that",     "is",       "are",      "was",      "were",     "be",       "have",
    "has",      "from",     "by",       "at",       "it",       "next",     "call",
    "fiscal",   "period",   "trend",    "rate",     "level",    "plan",     "program",
    "spending", "orders",   "backlog",  "shipments", "units",   "markets",  "quarterly"};

const std::vector<std::string> kUpWords = {"strong", "growth", "record", "exceeded",
                                           "improvement", "confident", "robust", "momentum"};
const std::vector<std::string> kDownWords = {"weak", "decline", "headwinds", "missed",
                                             "challenging", "disappointing", "losses", "downturn"};

// Label-independent words from the other lexicon categories, so every
// regression column varies.
const std::vector<std::string> kToneWords = {
    "uncertain", "worried", "risk",    "frustrated", "annoyed", "sadly",  "always",
    "definitely", "never",  "think",   "know",       "because", "effect", "should",
    "would",     "could",   "believe", "realize"};

std::string make_text(Rng& rng, int direction, bool agrees, std::size_t words) {
  const auto& markers = (direction == 1) == agrees ? kUpWords : kDownWords;
  std::string text;
  for (std::size_t i = 0; i < words; ++i) {
    const double u = rng.uniform();
    const auto& pool = u < 0.12 ? markers : u < 0.2 ? kToneWords : kFiller;
    if (!text.empty()) text += i % 17 == 16 ? ". " : " ";
    text += pool[rng.index(pool.size())];
  }
  text += ".";
  return text;
}

bool is_weekday(Date d) {
  const std::chrono::weekday w{d};
  return w != std::chrono::Saturday && w != std::chrono::Sunday;
}

Date to_weekday(Date d) {
  while (!is_weekday(d)) d += std::chrono::days(1);
  return d;
}

struct Series {
  std::vector<Date> days;
  std::vector<double> returns;  // return on day i relative to day i-1
};

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  Rng rng(mix_seed(spec.seed, 31));
  SyntheticData out;
  using std::chrono::days;
  using namespace std::chrono;
  const Date start = sys_days{year{spec.first_year} / January / 1} - days(45);
  const Date stop = sys_days{year{spec.last_year} / December / 31} + days(45);
  std::vector<Date> trading;
  for (Date d = start; d <= stop; d += days(1))
    if (is_weekday(d)) trading.push_back(d);
  std::map<Date, std::size_t> day_index;
  for (std::size_t i = 0; i < trading.size(); ++i) day_index[trading[i]] = i;

  std::map<std::string, std::vector<double>> index_returns;
  for (Sector s : spec.sectors) {
    auto& r = index_returns[std::string(reference_index(s))];
    if (!r.empty()) continue;
    for (std::size_t i = 0; i < trading.size(); ++i) r.push_back(0.004 * rng.normal());
  }

  std::ostringstream prices;
  prices << "symbol,date,close\n";
  for (const auto& [symbol, r] : index_returns) {
    double level = 100.0;
    for (std::size_t i = 0; i < trading.size(); ++i) {
      if (i > 0) level *= 1.0 + r[i];
      prices << symbol << ',' << format_date(trading[i]) << ',' << format_number(level, 10) << '\n';
    }
  }

  std::ostringstream recs, fund;
  recs << "ticker,date,rating\n";
  fund << "ticker,date,actual_sales,estimated_sales,actual_eps,estimated_eps\n";
  int next_id = 1;
  for (std::size_t si = 0; si < spec.sectors.size(); ++si) {
    const Sector sector = spec.sectors[si];
    const auto& idx = index_returns.at(std::string(reference_index(sector)));
    for (int k = 0; k < spec.tickers_per_sector; ++k) {
      const std::string ticker =
          std::string(sector_short_name(sector)).substr(0, 3) + std::string(1, char('A' + k));
      std::vector<double> r(trading.size());
      for (std::size_t i = 0; i < trading.size(); ++i) r[i] = idx[i] + 0.004 * rng.normal();

      for (int y = spec.first_year; y <= spec.last_year; ++y) {
        for (int q = 1; q <= 4; ++q) {
          const Date nominal = sys_days{year{y} / month{static_cast<unsigned>(3 * q - 1)} / 1} +
                               days(static_cast<int>(rng.index(20)));
          const Date call = to_weekday(nominal);
          const std::size_t i = day_index.at(call);
          const int dir = rng.bernoulli(0.5) ? 1 : -1;
          const int label = dir == 1 ? 1 : 0;
          // Jump across the call and a five-day drift against the index.
          r[i] = dir * 0.04 + 0.002 * rng.normal();
          for (std::size_t a = 1; a <= 5; ++a)
            r[i + a] = idx[i + a] + dir * (a == 1 ? 0.035 : 0.012) + 0.002 * rng.normal();

          TranscriptRecord t;
          t.id = "T" + std::to_string(next_id++);
          t.ticker = ticker;
          t.call_date = call;
          t.sector = sector;
          t.quarter = q;
          t.fiscal_year = y;
          t.text = make_text(rng, label, rng.uniform() < spec.signal, spec.words_per_doc);
          out.transcripts.push_back(t);
          out.directions.push_back(label);

          const int n_recs = static_cast<int>(rng.index(
              static_cast<std::uint64_t>(2 * spec.recommendations_per_call) + 1));
          for (int j = 0; j < n_recs; ++j) {
            const bool after = rng.bernoulli(0.4);
            const Date when = after ? call + days(1 + static_cast<int>(rng.index(5)))
                                    : call - days(1 + static_cast<int>(rng.index(28)));
            int level = static_cast<int>(rng.index(5));
            if (rng.bernoulli(0.5)) level = dir == 1 ? static_cast<int>(rng.index(2))
                                                     : 3 + static_cast<int>(rng.index(2));
            recs << ticker << ',' << format_date(when) << ','
                 << rating_name(static_cast<Rating>(level)) << '\n';
          }

          if (!rng.bernoulli(spec.fundamentals_missing)) {
            const double est_sales = 500.0 + 1500.0 * rng.uniform();
            const double act_sales = est_sales * (1.0 + dir * 0.02 + 0.05 * rng.normal());
            const double est_eps = 0.2 + 2.0 * rng.uniform();
            const double act_eps = est_eps * (1.0 + dir * 0.05 + 0.15 * rng.normal());
            const bool drop = rng.bernoulli(spec.fundamentals_missing / 3.0);
            fund << ticker << ',' << format_date(call + days(static_cast<int>(rng.index(3))))
                 << ',' << format_number(act_sales, 8) << ','
                 << (drop ? "" : format_number(est_sales, 8)) << ','
                 << format_number(act_eps, 6) << ',' << format_number(est_eps, 6) << '\n';
          }
        }
      }
      double level = 20.0 + 80.0 * rng.uniform();
      for (std::size_t i = 0; i < trading.size(); ++i) {
        if (i > 0) level *= 1.0 + r[i];
        prices << ticker << ',' << format_date(trading[i]) << ',' << format_number(level, 10)
               << '\n';
      }
    }
  }
  out.transcripts_jsonl = to_jsonl(out.transcripts);
  out.prices_csv = prices.str();
  out.recommendations_csv = recs.str();
  out.fundamentals_csv = fund.str();
  return out;
}

// Filler is drawn from a small fixed set so nearly every document contains
// all of it and only the markers vary between classes.
constexpr std::size_t kMarkerFiller = 16;

std::vector<std::pair<TokenStream, int>> marker_documents(std::size_t count, std::size_t length,
                                                          std::uint64_t seed,
                                                          bool shuffle_labels) {
  Rng rng(mix_seed(seed, 41));
  const std::vector<std::string> up = {"alpha", "apex", "ascend"};
  const std::vector<std::string> down = {"omega", "abyss", "descend"};
  std::vector<std::pair<TokenStream, int>> docs;
  std::vector<int> labels;
  for (std::size_t d = 0; d < count; ++d) {
    const int label = static_cast<int>(d % 2);
    TokenStream tokens;
    for (std::size_t i = 0; i < length; ++i) {
      if (rng.uniform() < 0.15) {
        const auto& pool = label == 1 ? up : down;
        tokens.push_back(pool[rng.index(pool.size())]);
      } else {
        tokens.push_back(kFiller[rng.index(kMarkerFiller)]);
      }
    }
    docs.emplace_back(std::move(tokens), label);
    labels.push_back(label);
  }
  if (shuffle_labels) {
    rng.shuffle(std::span<int>(labels));
    for (std::size_t d = 0; d < count; ++d) docs[d].second = labels[d];
  }
  return docs;
}

}  // namespace ecpipe
