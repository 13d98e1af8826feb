#include "ecpipe/harness.h"

#include <atomic>
#include <gtest/gtest.h>

#include "pipeline_support.h"
#include "test_util.h"

namespace ecpipe {
namespace {

using testing::daily;
using testing::error_code_of;

TranscriptRecord transcript(const std::string& id, const std::string& ticker, const char* date) {
  TranscriptRecord t;
  t.id = id;
  t.ticker = ticker;
  t.call_date = testing::day(date);
  t.sector = Sector::kTechnology;
  t.fiscal_year = 2019;
  t.text = "Strong growth.";
  return t;
}

TEST(Assemble, LabelsAndExclusionReasons) {
  PriceTable prices;
  prices.emplace("AAA", daily("AAA", "2019-03-01", {100, 100, 101, 102, 103, 104, 105, 106, 107, 108}));
  prices.emplace("XLK", daily("XLK", "2019-03-01", {50, 50, 50, 50, 50, 50, 50, 50, 50, 50}));
  const std::vector<TranscriptRecord> corpus = {transcript("a", "AAA", "2019-03-02"),
                                                transcript("b", "NOPE", "2019-03-02"),
                                                transcript("c", "AAA", "2019-02-01")};
  const auto vbl = assemble_dataset(corpus, prices, prices, LabelKind::value());
  ASSERT_EQ(vbl.examples.size(), 1u);
  EXPECT_EQ(vbl.examples[0].id, "a");
  EXPECT_EQ(vbl.examples[0].label, 1);
  EXPECT_EQ(vbl.examples[0].year, 2019);
  EXPECT_EQ(vbl.reason_counts.at("missing prices"), 1u);
  EXPECT_EQ(vbl.reason_counts.at("missing price data"), 1u);
  EXPECT_EQ(vbl.examples.size() + vbl.exclusions.size(), corpus.size());

  const auto sbl = assemble_dataset(corpus, prices, prices, LabelKind::shock(0.05));
  EXPECT_TRUE(sbl.examples.empty());
  EXPECT_EQ(sbl.reason_counts.at("below tau"), 1u);

  PriceTable no_index = {{"AAA", prices.at("AAA")}};
  const auto ibl = assemble_dataset(corpus, no_index, no_index, LabelKind::index(5));
  EXPECT_EQ(ibl.reason_counts.at("missing index"), 2u);
  EXPECT_EQ(labels_table(vbl).rows().size(), 1u);
  EXPECT_EQ(exclusions_table(vbl).rows().size(), 2u);
}

TEST(Summary, MeanSd) {
  const std::vector<double> one = {0.7};
  EXPECT_EQ(mean_sd(one), std::make_pair(0.7, 0.0));
  const std::vector<double> three = {1, 2, 3};
  EXPECT_EQ(mean_sd(three), std::make_pair(2.0, 1.0));
  const std::vector<double> same = {0.95, 0.95, 0.95};
  EXPECT_EQ(mean_sd(same), std::make_pair(0.95, 0.0));
}

TEST(Summary, FlagsTooFewSeeds) {
  ExperimentConfig cfg;
  cfg.sectors = {Sector::kTechnology};
  cfg.methods = {Method::kDeSvm};
  std::vector<RunRecord> runs(2);
  for (std::size_t i = 0; i < 2; ++i) {
    runs[i].sector = Sector::kTechnology;
    runs[i].method = Method::kDeSvm;
    runs[i].seed = i;
    runs[i].metrics.accuracy = 0.5 + 0.1 * static_cast<double>(i);
  }
  const auto table = summarize_runs(runs, cfg);
  const auto* cell = table.find(Sector::kTechnology, Method::kDeSvm);
  ASSERT_NE(cell, nullptr);
  EXPECT_EQ(cell->runs, 2u);
  EXPECT_TRUE(cell->below_min_seeds);
  EXPECT_NEAR(cell->accuracy_mean, 0.55, 1e-15);
  EXPECT_EQ(runs_table(runs).rows().size(), 2u);
}

TEST(Parallel, RunsEveryJobOnceAndReportsLowestFailure) {
  std::vector<std::atomic<int>> hits(50);
  run_parallel(50, 4, [&](std::size_t j) { ++hits[j]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  try {
    run_parallel(20, 3, [](std::size_t j) {
      if (j == 7 || j == 15) throw Error(ErrorCode::kEmptyInput, "job " + std::to_string(j));
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "EmptyInput: job 7");
  }
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new SyntheticData(generate_synthetic(testing::small_spec()));
  }
  static void TearDownTestSuite() { delete data_; }
  static SyntheticData* data_;
};

SyntheticData* PipelineTest::data_ = nullptr;

TEST_F(PipelineTest, SyntheticCorpusFullyLabeled) {
  const auto in = testing::inputs_from(*data_);
  for (const LabelKind& kind : {LabelKind::value(), LabelKind::shock(), LabelKind::index(5)}) {
    const auto ds = assemble_dataset(in.transcripts, in.prices, in.prices, kind);
    EXPECT_EQ(ds.examples.size(), in.transcripts.size()) << kind.name();
    for (const auto& e : ds.examples) EXPECT_EQ(e.label, data_->directions[e.transcript]);
  }
}

TEST_F(PipelineTest, RunIsDeterministicAndThreadIndependent) {
  const auto in = testing::inputs_from(*data_);
  auto cfg = testing::small_config();
  cfg.methods = {Method::kStockGnn, Method::kDeLogReg, Method::kSeMlp};
  cfg.seeds = {0};
  const auto a = run_experiment(cfg, in);
  cfg.threads = 2;
  const auto b = run_experiment(cfg, in);
  EXPECT_EQ(a.table.to_table().to_csv(), b.table.to_table().to_csv());
  EXPECT_EQ(a.checkpoints, b.checkpoints);
  EXPECT_EQ(a.checkpoints.size(), 2u);
  EXPECT_TRUE(a.checkpoints.contains("stockgnn_Fin_seed0.json"));
  for (const auto& c : a.table.cells) {
    EXPECT_EQ(c.accuracy_sd, 0.0);
    EXPECT_EQ(c.recall_sd, 0.0);
  }
}

TEST_F(PipelineTest, DigestIgnoresThreadsButNotSettings) {
  const auto in = testing::inputs_from(*data_);
  auto cfg = testing::small_config();
  const std::string base = experiment_digest(cfg, in);
  EXPECT_EQ(base.size(), 16u);
  cfg.threads = 4;
  EXPECT_EQ(experiment_digest(cfg, in), base);
  cfg.gnn.epochs += 1;
  EXPECT_NE(experiment_digest(cfg, in), base);
}

TEST_F(PipelineTest, InsufficientDataBeforeFitting) {
  const auto in = testing::inputs_from(*data_);
  auto cfg = testing::small_config();
  cfg.min_examples = 100000;
  EXPECT_EQ(error_code_of([&] { run_experiment(cfg, in); }), ErrorCode::kInsufficientData);
}

TEST_F(PipelineTest, RegressionRowsCarryAllFields) {
  const auto in = testing::inputs_from(*data_);
  const auto rows = build_regression_rows(testing::small_config(), in);
  ASSERT_EQ(rows.size(), in.transcripts.size());
  for (const char* label : {"y_v", "y_s", "y_I5"}) EXPECT_TRUE(rows[0].labels.contains(label));
  for (const char* cat : {"sector", "year", "MAR_1m", "MAR_5d"}) EXPECT_TRUE(rows[0].categorical.contains(cat));
  for (const auto& name : kSentimentRegressors) EXPECT_TRUE(rows[0].continuous.contains(name));
  std::size_t missing_sales = 0;
  for (const auto& r : rows) missing_sales += !r.continuous.at("actual_sales").has_value();
  EXPECT_GT(missing_sales, 0u);
  EXPECT_LT(missing_sales, rows.size());
}

double de_logreg_accuracy(double signal, Sector sector) {
  auto spec = testing::small_spec(1);
  spec.signal = signal;
  spec.tickers_per_sector = 10;
  spec.words_per_doc = 40;
  const auto in = testing::inputs_from(generate_synthetic(spec));
  auto cfg = testing::small_config();
  cfg.methods = {Method::kDeLogReg};
  cfg.seeds = {0};
  cfg.min_seeds = 1;
  cfg.doc2vec.epochs = 30;
  const auto result = run_experiment(cfg, in);
  return result.table.find(sector, Method::kDeLogReg)->accuracy_mean;
}

TEST(PlantedSignal, DocEmbeddingsRecoverMarkersAndNotNoise) {
  for (Sector s : {Sector::kFinancial, Sector::kTechnology}) {
    EXPECT_GE(de_logreg_accuracy(1.0, s), 0.85) << sector_short_name(s);
    EXPECT_LE(de_logreg_accuracy(0.5, s), 0.7) << sector_short_name(s);
  }
}

}  // namespace
}  // namespace ecpipe
