#pragma once

#include <span>
#include <string>
#include <vector>

#include "ecpipe/csv.h"
#include "ecpipe/fundamentals.h"
#include "ecpipe/harness.h"
#include "ecpipe/sentiment.h"

namespace ecpipe {

enum class GroupBy { kYear, kQuarter, kSector };

GroupBy parse_group_by(std::string_view text);  // kInvalidConfig

// Per group: total, label counts and fractions. Groups with no examples are
// omitted; quarters print as "2018Q3".
Table report_distributions(const AssembledDataset& dataset, GroupBy group_by);

// Per (year, label): row count and the mean of each category score.
// `scores[i]` belongs to `dataset.examples[i]`.
Table report_sentiment_by_year(const AssembledDataset& dataset,
                               std::span<const SentimentScores> scores);

struct BeatMissReport {
  Table rows{{"id", "label", "sales_factor", "eps_factor"}};
  // Calls without fundamentals or with |estimate| below epsilon.
  Table flagged{{"id", "reason"}};
};

BeatMissReport report_beat_miss(const AssembledDataset& dataset,
                                std::span<const TranscriptRecord> corpus,
                                std::span<const FundamentalsRecord> fundamentals,
                                double epsilon = kBeatMissEpsilon);

struct ChartSeries {
  std::string name;
  std::vector<double> values;  // one per category
};

// Static grouped bar chart as standalone SVG.
std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<ChartSeries>& series);

}  // namespace ecpipe
