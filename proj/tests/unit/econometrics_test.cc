#include "ecpipe/econometrics.h"

#include <cmath>
#include <gtest/gtest.h>

#include "ecpipe/rng.h"
#include "oracles.h"
#include "test_util.h"

namespace ecpipe {
namespace {

using testing::error_code_of;

RegressionRow row(std::optional<int> y, std::map<std::string, std::optional<double>> cont = {},
                  std::map<std::string, std::optional<std::string>> cat = {}) {
  RegressionRow r;
  r.labels["y"] = y;
  r.continuous = std::move(cont);
  r.categorical = std::move(cat);
  return r;
}

TEST(Design, DummiesDropReferenceLevel) {
  const std::vector<RegressionRow> rows = {row(1, {}, {{"sector", "Tech"}}),
                                           row(0, {}, {{"sector", "Fin"}}),
                                           row(1, {}, {{"sector", "Fin"}})};
  const auto d = build_design(rows, {"m", "y", {}, {"sector"}});
  EXPECT_EQ(d.columns, (std::vector<std::string>{"(Intercept)", "sector=Tech"}));
  EXPECT_EQ(d.x, (Matrix{{1, 1}, {1, 0}, {1, 0}}));
}

TEST(Design, MissingValuesDroppedAndCounted) {
  const std::vector<RegressionRow> rows = {
      row(1, {{"a", 1.0}}, {{"MAR_1m", "hold"}}), row(0, {{"a", 2.0}}, {{"MAR_1m", std::nullopt}}),
      row(std::nullopt, {{"a", 3.0}}, {{"MAR_1m", "hold"}}), row(0, {}, {{"MAR_1m", "buy"}}),
      row(0, {{"a", 0.5}}, {{"MAR_1m", "buy"}}), row(1, {{"a", 4.0}}, {{"MAR_1m", "buy"}}),
      row(1, {{"a", -1.0}}, {{"MAR_1m", "hold"}})};
  const auto d = build_design(rows, {"m", "y", {"a"}, {"MAR_1m"}});
  EXPECT_EQ(d.row_ids, (std::vector<std::size_t>{0, 4, 5, 6}));
  EXPECT_EQ(d.report.total, 7u);
  EXPECT_EQ(d.report.kept, 4u);
  EXPECT_EQ(d.columns.back(), "MAR_1m=hold");
  std::size_t dropped = 0;
  for (const auto& [reason, n] : d.report.reasons) dropped += n;
  EXPECT_EQ(dropped, 3u);
}

TEST(Design, ConstantRegressorIsRankDeficient) {
  const std::vector<RegressionRow> rows = {row(1, {{"c", 2.0}}), row(0, {{"c", 2.0}}), row(1, {{"c", 2.0}})};
  try {
    build_design(rows, {"m", "y", {"c"}, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficient);
    EXPECT_NE(std::string(e.what()).find("c"), std::string::npos);
  }
}

TEST(Design, CommonSampleRestriction) {
  const std::vector<RegressionRow> rows = {row(1), row(0), row(1)};
  const std::vector<std::size_t> only = {0, 2};
  const auto d = build_design(rows, {"m", "y", {}, {}}, &only);
  EXPECT_EQ(d.row_ids, only);
  EXPECT_EQ(d.report.reasons.at("outside common sample"), 1u);
}

TEST(Logit, InterceptOnlyClosedForm) {
  std::vector<RegressionRow> rows;
  for (int i = 0; i < 100; ++i) rows.push_back(row(i < 50 ? 1 : 0));
  const auto fit = fit_logit(build_design(rows, {"m", "y", {}, {}}));
  EXPECT_NEAR(fit.coefficients[0].estimate, 0.0, 1e-12);
  EXPECT_NEAR(fit.log_likelihood, 100 * std::log(0.5), 1e-9);
  EXPECT_NEAR(fit.bic, 143.234606297977, 1e-6);
  EXPECT_NEAR(fit.coefficients[0].std_error, 0.2, 1e-12);  // sqrt(1 / (n p (1-p)))
  EXPECT_EQ(fit.n, 100u);
}

TEST(Logit, RecoversSimulatedCoefficients) {
  Rng rng(1);
  std::vector<RegressionRow> rows;
  for (int i = 0; i < 20000; ++i) {
    const double x = rng.normal();
    rows.push_back(row(rng.bernoulli(oracle::sigmoid(0.5 - 1.0 * x)), {{"x", x}}));
  }
  const auto fit = fit_logit(build_design(rows, {"m", "y", {"x"}, {}}));
  const double truth[] = {0.5, -1.0};
  for (int i = 0; i < 2; ++i) {
    const auto& c = fit.coefficients[i];
    EXPECT_LT(std::abs(c.estimate - truth[i]), 3 * c.std_error) << c.term;
  }
  EXPECT_LT(fit.coefficients[1].p_value, 1e-10);
  EXPECT_EQ(significance_stars(fit.coefficients[1].p_value), "***");
  EXPECT_LT(fit.score_max_norm, 1e-8);
}

TEST(Logit, SeparationAndDegenerate) {
  std::vector<RegressionRow> rows;
  for (int i = 0; i < 20; ++i) rows.push_back(row(i >= 10, {{"x", static_cast<double>(i)}}));
  EXPECT_EQ(error_code_of([&] { fit_logit(build_design(rows, {"m", "y", {"x"}, {}})); }),
            ErrorCode::kSeparation);
  std::vector<RegressionRow> same(5, row(1, {{"x", 1.0}}));
  for (int i = 0; i < 5; ++i) same[i].continuous["x"] = i;
  EXPECT_EQ(error_code_of([&] { fit_logit(build_design(same, {"m", "y", {"x"}, {}})); }),
            ErrorCode::kDegenerateLabels);
}

TEST(Logit, TooFewRows) {
  const std::vector<RegressionRow> rows = {row(1, {{"x", 1.0}}), row(0, {{"x", 2.0}})};
  EXPECT_EQ(error_code_of([&] { fit_logit(build_design(rows, {"m", "y", {"x"}, {}})); }),
            ErrorCode::kInsufficientData);
}

TEST(Stars, Thresholds) {
  EXPECT_EQ(significance_stars(0.0009), "***");
  EXPECT_EQ(significance_stars(0.009), "**");
  EXPECT_EQ(significance_stars(0.049), "*");
  EXPECT_EQ(significance_stars(0.05), "");
}

std::vector<RegressionRow> grid_rows(std::size_t n, Rng& rng) {
  std::vector<RegressionRow> rows;
  static const char* sectors[] = {"Fin", "Tech", "Health"};
  for (std::size_t i = 0; i < n; ++i) {
    RegressionRow r;
    const int year = 2016 + static_cast<int>(rng.index(4));
    double eta = year >= 2018 ? 0.8 : -0.8;
    for (const auto& name : kSentimentRegressors) r.continuous[name] = rng.uniform(0, 5);
    for (const char* name : {"cogproc", "insight", "cause", "discrep"}) r.continuous[name] = rng.uniform(0, 5);
    for (const auto& name : kSalesEpsRegressors)
      r.continuous[name] = rng.bernoulli(0.2) ? std::nullopt : std::optional<double>(rng.normal());
    eta += 0.2 * (*r.continuous["posemo"] - 2.5);
    r.categorical["sector"] = std::string(sectors[rng.index(3)]);
    r.categorical["year"] = std::to_string(year);
    r.labels["y_v"] = rng.bernoulli(oracle::sigmoid(eta));
    rows.push_back(r);
  }
  return rows;
}

TEST(Grid, SentimentGridNestedAndMonotone) {
  Rng rng(2);
  const auto rows = grid_rows(800, rng);
  auto grid = sentiment_grid("y_v");
  ASSERT_EQ(grid.models.size(), 5u);
  grid.common_rows = true;
  const auto fits = run_model_grid(rows, grid);
  EXPECT_TRUE(loglik_monotone(fits));
  for (const auto& f : fits) EXPECT_EQ(f.n, fits.front().n);

  grid.common_rows = false;
  const auto loose = run_model_grid(rows, grid);
  EXPECT_LT(loose.back().n, loose.front().n);
}

TEST(Grid, BicPrefersYearWhenYearMatters) {
  Rng rng(3);
  const auto rows = grid_rows(1500, rng);
  const ModelSpec without{"m1", "y_v", {"posemo"}, {}};
  const ModelSpec with{"m2", "y_v", {"posemo"}, {"year"}};
  const auto fits = run_model_grid(rows, {"g", {without, with}, true});
  EXPECT_LT(fits[1].bic, fits[0].bic);
}

TEST(Grid, RecommendationGridShape) {
  const auto g = recommendation_grid("y_v");
  ASSERT_EQ(g.models.size(), 5u);
  EXPECT_EQ(g.models[0].continuous, kSentimentRegressors);
  EXPECT_TRUE(g.models[0].categorical.empty());
  EXPECT_EQ(g.models[4].categorical.back(), "MAR_5d");
}

TEST(Tables, RegressionTableLayout) {
  std::vector<RegressionRow> rows;
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.normal();
    rows.push_back(row(rng.bernoulli(oracle::sigmoid(x)), {{"x", x}}));
  }
  const auto fits = run_model_grid(rows, {"g", {{"m1", "y", {}, {}}, {"m2", "y", {"x"}, {}}}, true});
  const std::string text = regression_table(fits).to_text();
  EXPECT_NE(text.find("Observations"), std::string::npos);
  EXPECT_NE(text.find("BIC"), std::string::npos);
  EXPECT_NE(text.find("***"), std::string::npos);
  EXPECT_NE(bic_table(fits).to_csv().find("m2"), std::string::npos);
}

}  // namespace
}  // namespace ecpipe
