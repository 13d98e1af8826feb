#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecpipe/csv.h"
#include "ecpipe/matrix.h"

namespace ecpipe {

// One observation for regression. Absent keys and nullopt values both count
// as missing.
struct RegressionRow {
  std::map<std::string, std::optional<int>> labels;  // y_v, y_s, y_I5, ...
  std::map<std::string, std::optional<double>> continuous;
  std::map<std::string, std::optional<std::string>> categorical;
};

struct ModelSpec {
  std::string name;
  std::string dependent;
  std::vector<std::string> continuous;
  std::vector<std::string> categorical;
};

struct DropReport {
  std::size_t total = 0;
  std::size_t kept = 0;
  // Reason -> rows; a row is counted once, under its first failing field.
  std::map<std::string, std::size_t> reasons;
};

struct Design {
  Matrix x;                           // intercept column first
  std::vector<int> y;
  std::vector<std::string> columns;   // "(Intercept)", regressors, "var=level"
  std::vector<std::size_t> row_ids;   // indices into the input rows
  DropReport report;
};

// Drops rows with a missing label or regressor, prepends the intercept and
// expands each categorical into dummies, omitting the lexicographically first
// level seen in the kept rows. When `only_rows` is given, other rows are
// dropped with reason "outside common sample". Throws kRankDeficient naming
// the columns that are linear combinations of earlier ones.
Design build_design(std::span<const RegressionRow> rows, const ModelSpec& spec,
                    const std::vector<std::size_t>* only_rows = nullptr);

struct Coefficient {
  std::string term;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

// "***" p < 0.001, "**" p < 0.01, "*" p < 0.05.
std::string significance_stars(double p_value);

struct FitReport {
  std::string model;
  std::string dependent;
  std::vector<Coefficient> coefficients;
  std::size_t n = 0;
  double log_likelihood = 0.0;
  double bic = 0.0;  // k ln n - 2 logL, k = coefficients.size()
  int iterations = 0;
  double score_max_norm = 0.0;
  std::vector<std::size_t> row_ids;
  DropReport drops;

  const Coefficient* find(const std::string& term) const;
};

struct LogitOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 100;
  double separation_norm = 1e6;
};

// Newton-Raphson with step halving. Standard errors from the inverse observed
// information; two-sided normal p-values. Throws kDegenerateLabels,
// kInsufficientData (n <= p), kSeparation, kNonConvergence.
FitReport fit_logit(const Design& design, const LogitOptions& options = {});

struct GridSpec {
  std::string name;
  std::vector<ModelSpec> models;
  // Fit every model on the rows complete for all of them, so log-likelihoods
  // are comparable.
  bool common_rows = false;
};

// Sentiment categories entered in the sentiment regressions.
inline const std::vector<std::string> kSentimentRegressors = {
    "posemo", "negemo", "anx", "anger", "sad", "certain"};
inline const std::vector<std::string> kSalesEpsRegressors = {
    "actual_sales", "estimated_sales", "actual_eps", "estimated_eps"};

// Models 1-5: sector + year; + posemo, negemo; + anx, anger, sad, certain;
// + cogproc, insight, cause, discrep; + sales and EPS.
GridSpec sentiment_grid(const std::string& dependent);
// Models 1-5: six sentiments; + MAR_1m; + sector; + year; + MAR_5d.
GridSpec recommendation_grid(const std::string& dependent);

std::vector<FitReport> run_model_grid(std::span<const RegressionRow> rows,
                                      const GridSpec& grid,
                                      const LogitOptions& options = {});

// True when every consecutive pair of fits on identical rows has
// non-decreasing log-likelihood (within `slack`).
bool loglik_monotone(std::span<const FitReport> fits, double slack = 1e-9);

// Variable x model table: "coef***" with the standard error in parentheses on
// the following row, then Observations, Log-likelihood and BIC rows.
Table regression_table(std::span<const FitReport> fits);
// One row per model: name, N, k, logL, BIC, delta BIC to the best model.
Table bic_table(std::span<const FitReport> fits);

}  // namespace ecpipe
