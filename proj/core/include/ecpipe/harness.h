#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecpipe/classifiers.h"
#include "ecpipe/corpus.h"
#include "ecpipe/csv.h"
#include "ecpipe/econometrics.h"
#include "ecpipe/experiment_config.h"
#include "ecpipe/fundamentals.h"
#include "ecpipe/market_labels.h"
#include "ecpipe/recommendations.h"
#include "ecpipe/sentiment.h"
#include "ecpipe/textgraph.h"

namespace ecpipe {

using PriceTable = std::map<std::string, PriceSeries>;

struct LabeledExample {
  std::size_t transcript = 0;  // index into the corpus
  std::string id;
  std::string ticker;
  Date call_date;
  Sector sector = Sector::kNotSpecified;
  int year = 0;  // calendar year of the call; drives the train/test split
  int quarter = 1;
  int label = 0;
};

struct Exclusion {
  std::string id;
  std::string reason;
};

struct AssembledDataset {
  LabelKind label;
  std::vector<LabeledExample> examples;  // corpus order
  std::vector<Exclusion> exclusions;
  std::map<std::string, std::size_t> reason_counts;
};

// Exclusion reasons: "missing prices", "missing index", "missing price data"
// (gaps around the call), "below tau", "IBL undefined".
AssembledDataset assemble_dataset(std::span<const TranscriptRecord> corpus,
                                  const PriceTable& prices, const PriceTable& indices,
                                  const LabelKind& label,
                                  int max_gap_days = kDefaultMaxGapDays);

Table labels_table(const AssembledDataset& dataset);
Table exclusions_table(const AssembledDataset& dataset);

struct PipelineInputs {
  std::vector<TranscriptRecord> transcripts;
  std::vector<LineError> transcript_errors;
  PriceTable prices;  // stock and index series together
  std::vector<RecommendationRecord> recommendations;
  std::vector<FundamentalsRecord> fundamentals;
  Lexicon lexicon;
  std::optional<EmbeddingTable> word_vectors;
  // Input name -> FNV-1a digest of the file bytes.
  std::map<std::string, std::uint64_t> digests;
};

// Reads every configured input. Optional inputs with an empty path are left
// empty. Throws kFileUnreadable, kSchemaViolation, kParseError.
PipelineInputs load_inputs(const ExperimentConfig& config);

// Hex digest of the resolved config (input paths excluded) and input digests;
// names the output directory of a run.
std::string experiment_digest(const ExperimentConfig& config, const PipelineInputs& inputs);

struct RunRecord {
  Sector sector = Sector::kNotSpecified;
  Method method = Method::kStockGnn;
  std::uint64_t seed = 0;
  Evaluation metrics;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t doc_dim = 0;  // selected Doc2Vec dimension, 0 if unused
};

struct ResultCell {
  Sector sector = Sector::kNotSpecified;
  Method method = Method::kStockGnn;
  std::size_t runs = 0;
  double accuracy_mean = 0.0, accuracy_sd = 0.0;
  double precision_mean = 0.0, precision_sd = 0.0;
  double recall_mean = 0.0, recall_sd = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  // Selected Doc2Vec dimension per seed, e.g. "100" or "100/300".
  std::string doc_dims;
  bool below_min_seeds = false;
};

struct ResultTable {
  std::vector<ResultCell> cells;  // config sector order, then method order

  const ResultCell* find(Sector sector, Method method) const;
  // sector, method, runs, accuracy mean/sd, precision mean/sd, recall
  // mean/sd, sizes, dims, flag.
  Table to_table() const;
};

// Mean and sample standard deviation (n - 1); sd is 0 for a single value.
std::pair<double, double> mean_sd(std::span<const double> values);

ResultTable summarize_runs(std::span<const RunRecord> runs,
                           const ExperimentConfig& config);
Table runs_table(std::span<const RunRecord> runs);

struct ExperimentResult {
  AssembledDataset dataset;
  std::vector<RunRecord> runs;  // job order: sector, method, seed
  ResultTable table;
  // Checkpoint file name -> contents, for StockGNN jobs.
  std::map<std::string, std::string> checkpoints;
};

using ProgressFn = std::function<void(const std::string&)>;

// Fits each method on the training years of each sector and evaluates on the
// test year, once per seed. Throws kInsufficientData when a sector's train or
// test split has fewer than config.min_examples examples (checked for every
// sector before any fitting).
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const PipelineInputs& inputs,
                                const ProgressFn& progress = nullptr);

// Regression rows: labels y_v, y_s and y_I<k>; every lexicon category and the
// four sales/EPS values as continuous regressors; sector, year, MAR_1m and
// MAR_5d as categoricals. One row per transcript in corpus order.
std::vector<RegressionRow> build_regression_rows(const ExperimentConfig& config,
                                                 const PipelineInputs& inputs);

// Runs `jobs` on up to `threads` workers. Each job writes only its own slot,
// so callers merge by index.
void run_parallel(std::size_t jobs, unsigned threads,
                  const std::function<void(std::size_t)>& job);

}  // namespace ecpipe
