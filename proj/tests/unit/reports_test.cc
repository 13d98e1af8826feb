#include "ecpipe/reports.h"

#include <gtest/gtest.h>

#include "ecpipe/fundamentals.h"
#include "test_util.h"

namespace ecpipe {
namespace {

using testing::day;
using testing::error_code_of;

LabeledExample example(std::size_t t, int year, int quarter, int label, Sector s = Sector::kTechnology) {
  LabeledExample e;
  e.transcript = t;
  e.id = "t" + std::to_string(t);
  e.ticker = "T" + std::to_string(t);
  e.year = year;
  e.quarter = quarter;
  e.label = label;
  e.sector = s;
  return e;
}

TEST(Fundamentals, BeatMissFactor) {
  EXPECT_EQ(beat_miss_factor(150.0, 100.0), 0.5);
  EXPECT_EQ(beat_miss_factor(100.0, 100.0), 0.0);
  EXPECT_EQ(beat_miss_factor(-1.0, -2.0), 0.5);
  EXPECT_FALSE(beat_miss_factor(1.0, 0.0));
  EXPECT_FALSE(beat_miss_factor(std::nullopt, 1.0));
}

TEST(Fundamentals, ParseAndMatch) {
  const auto recs = parse_fundamentals_csv(
      "ticker,date,actual_sales,estimated_sales,actual_eps,estimated_eps\n"
      "AAA,2019-01-10,10,9,1,\n"
      "AAA,2019-01-04,10,9,1,0.9\n"
      "AAA,2019-01-08,11,na,1,0.9\n");
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].date, day("2019-01-04"));
  EXPECT_TRUE(recs[0].complete());
  EXPECT_FALSE(recs[1].estimated_sales);
  const auto m = match_fundamentals(recs, "AAA", day("2019-01-06"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->date, day("2019-01-04"));
  EXPECT_FALSE(match_fundamentals(recs, "AAA", day("2019-01-20")));
  EXPECT_FALSE(match_fundamentals(recs, "BBB", day("2019-01-06")));
}

TEST(Distributions, FractionsAndTotals) {
  AssembledDataset ds;
  ds.examples = {example(0, 2018, 1, 1), example(1, 2018, 2, 1), example(2, 2018, 3, 0),
                 example(3, 2018, 4, 0), example(4, 2019, 1, 1)};
  const auto t = report_distributions(ds, GroupBy::kYear);
  ASSERT_EQ(t.rows().size(), 2u);
  EXPECT_EQ(t.rows()[0], (std::vector<std::string>{"2018", "4", "2", "2", "0.5", "0.5"}));
  std::size_t total = 0;
  for (const auto& r : t.rows()) total += std::stoul(r[1]);
  EXPECT_EQ(total, ds.examples.size());
  const auto q = report_distributions(ds, GroupBy::kQuarter);
  EXPECT_EQ(q.rows()[0][0], "2018Q1");
  EXPECT_EQ(q.rows().size(), 5u);
  EXPECT_EQ(report_distributions(ds, GroupBy::kSector).rows().size(), 1u);
  EXPECT_EQ(error_code_of([] { parse_group_by("month"); }), ErrorCode::kInvalidConfig);
}

TEST(SentimentByYear, MeansPerYearAndLabel) {
  AssembledDataset ds;
  ds.examples = {example(0, 2018, 1, 0), example(1, 2018, 1, 1), example(2, 2018, 2, 1)};
  std::vector<SentimentScores> scores(3);
  for (std::size_t i = 0; i < 3; ++i) {
    scores[i].categories = {"posemo"};
    scores[i].scores = {static_cast<double>(i) * 2.0};
  }
  const auto t = report_sentiment_by_year(ds, scores);
  ASSERT_EQ(t.rows().size(), 2u);
  EXPECT_EQ(t.rows()[1], (std::vector<std::string>{"2018", "1", "2", "3"}));
}

TEST(BeatMiss, FlagsMissingFundamentals) {
  std::vector<TranscriptRecord> corpus(2);
  corpus[0].ticker = "T0";
  corpus[0].call_date = day("2019-01-05");
  corpus[1].ticker = "T1";
  corpus[1].call_date = day("2019-01-05");
  AssembledDataset ds;
  ds.examples = {example(0, 2019, 1, 1), example(1, 2019, 1, 0)};
  const std::vector<FundamentalsRecord> f = {{"T0", day("2019-01-05"), 150.0, 100.0, 2.0, 2.0}};
  const auto r = report_beat_miss(ds, corpus, f);
  ASSERT_EQ(r.rows.rows().size(), 1u);
  EXPECT_EQ(r.rows.rows()[0], (std::vector<std::string>{"t0", "1", "0.5", "0"}));
  ASSERT_EQ(r.flagged.rows().size(), 1u);
  EXPECT_EQ(r.flagged.rows()[0][0], "t1");
}

TEST(Chart, StandaloneSvg) {
  const auto svg = svg_bar_chart("Label <share>", {"2018", "2019"}, {{"up", {0.4, 0.6}}, {"down", {0.6, 0.4}}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("Label &lt;share&gt;"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace ecpipe
