#include "ecpipe/reports.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "ecpipe/error.h"

namespace ecpipe {

GroupBy parse_group_by(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "year") return GroupBy::kYear;
  if (t == "quarter") return GroupBy::kQuarter;
  if (t == "sector") return GroupBy::kSector;
  throw Error(ErrorCode::kInvalidConfig, "group_by must be year, quarter or sector");
}

Table report_distributions(const AssembledDataset& dataset, GroupBy group_by) {
  std::map<std::string, std::array<std::size_t, 2>> counts;
  for (const auto& e : dataset.examples) {
    std::string key;
    switch (group_by) {
      case GroupBy::kYear: key = std::to_string(e.year); break;
      case GroupBy::kQuarter: key = std::to_string(e.year) + "Q" + std::to_string(e.quarter); break;
      case GroupBy::kSector: key = std::string(sector_short_name(e.sector)); break;
    }
    ++counts[key][e.label == 1 ? 1 : 0];
  }
  Table t({"group", "count", "label0", "label1", "fraction0", "fraction1"});
  for (const auto& [key, c] : counts) {
    const std::size_t n = c[0] + c[1];
    t.add_row({key, std::to_string(n), std::to_string(c[0]), std::to_string(c[1]),
               format_number(static_cast<double>(c[0]) / n, 6),
               format_number(static_cast<double>(c[1]) / n, 6)});
  }
  return t;
}

Table report_sentiment_by_year(const AssembledDataset& dataset,
                               std::span<const SentimentScores> scores) {
  if (scores.size() != dataset.examples.size()) {
    throw Error(ErrorCode::kShapeMismatch, "one score set per example expected");
  }
  std::vector<std::string> header = {"year", "label", "count"};
  const std::vector<std::string> cats =
      scores.empty() ? std::vector<std::string>{} : scores.front().categories;
  header.insert(header.end(), cats.begin(), cats.end());
  std::map<std::pair<int, int>, std::pair<std::size_t, std::vector<double>>> acc;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& e = dataset.examples[i];
    auto& [n, sums] = acc[{e.year, e.label}];
    if (sums.empty()) sums.assign(cats.size(), 0.0);
    ++n;
    for (std::size_t c = 0; c < cats.size(); ++c) sums[c] += scores[i].scores[c];
  }
  Table t(header);
  for (const auto& [key, v] : acc) {
    std::vector<std::string> row = {std::to_string(key.first), std::to_string(key.second),
                                    std::to_string(v.first)};
    for (double s : v.second) row.push_back(format_number(s / v.first, 6));
    t.add_row(std::move(row));
  }
  return t;
}

BeatMissReport report_beat_miss(const AssembledDataset& dataset,
                                std::span<const TranscriptRecord> corpus,
                                std::span<const FundamentalsRecord> fundamentals,
                                double epsilon) {
  BeatMissReport out;
  for (const auto& e : dataset.examples) {
    const auto& tr = corpus[e.transcript];
    const auto f = match_fundamentals(fundamentals, tr.ticker, tr.call_date);
    if (!f) {
      out.flagged.add_row({e.id, "no fundamentals within join window"});
      continue;
    }
    const auto sales = beat_miss_factor(f->actual_sales, f->estimated_sales, epsilon);
    const auto eps = beat_miss_factor(f->actual_eps, f->estimated_eps, epsilon);
    if (!sales || !eps) {
      out.flagged.add_row({e.id, !sales ? "sales estimate missing or near zero"
                                        : "EPS estimate missing or near zero"});
      continue;
    }
    out.rows.add_row({e.id, std::to_string(e.label), format_number(*sales, 6),
                      format_number(*eps, 6)});
  }
  return out;
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                    "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};

}  // namespace

std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<ChartSeries>& series) {
  const double width = 720, height = 360, left = 60, right = 20, top = 40, bottom = 70;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  double lo = 0.0, hi = 0.0;
  for (const auto& s : series)
    for (double v : s.values)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (hi == lo) hi = lo + 1.0;
  auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape_xml(title) << "</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = lo + (hi - lo) * tick / 4.0;
    const double y = y_of(v);
    svg << "<line x1=\"" << left << "\" x2=\"" << width - right << "\" y1=\"" << y << "\" y2=\""
        << y << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << format_number(v, 3) << "</text>\n";
  }
  const double group_w = categories.empty() ? plot_w : plot_w / categories.size();
  const double bar_w = series.empty() ? 0 : group_w * 0.8 / series.size();
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = left + group_w * c + group_w * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (c >= series[s].values.size() || !std::isfinite(series[s].values[c])) continue;
      const double v = series[s].values[c];
      const double y0 = y_of(std::max(v, 0.0)), y1 = y_of(std::min(v, 0.0));
      svg << "<rect x=\"" << gx + bar_w * s << "\" y=\"" << y0 << "\" width=\"" << bar_w
          << "\" height=\"" << y1 - y0 << "\" fill=\"" << kPalette[s % 8] << "\"/>\n";
    }
    svg << "<text x=\"" << gx + group_w * 0.4 << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\">" << escape_xml(categories[c]) << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double x = left + 110.0 * s;
    svg << "<rect x=\"" << x << "\" y=\"" << height - 24 << "\" width=\"10\" height=\"10\" fill=\""
        << kPalette[s % 8] << "\"/>\n";
    svg << "<text x=\"" << x + 14 << "\" y=\"" << height - 15 << "\">"
        << escape_xml(series[s].name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace ecpipe
