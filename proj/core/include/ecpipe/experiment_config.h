#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ecpipe/classifiers.h"
#include "ecpipe/corpus.h"
#include "ecpipe/docembed.h"
#include "ecpipe/market_labels.h"
#include "ecpipe/neural.h"
#include "ecpipe/textgraph.h"

namespace ecpipe {

enum class Method { kStockGnn, kDeSvm, kDeLogReg, kDeMlp, kSeMlp, kSentimentMlp, kCombinedMlp };

inline constexpr Method kAllMethods[] = {Method::kStockGnn,     Method::kDeSvm,
                                         Method::kDeLogReg,     Method::kDeMlp,
                                         Method::kSeMlp,        Method::kSentimentMlp,
                                         Method::kCombinedMlp};

// "StockGNN", "DEsvm", "DElogreg", "DEmlp", "SE-mlp", "sentiment-mlp",
// "combined-mlp".
std::string_view method_name(Method m);
Method parse_method(std::string_view text);  // case-insensitive; kInvalidConfig
bool uses_doc_embeddings(Method m);

enum class Doc2VecMode {
  kInfer,     // train on training-year text, infer vectors for test documents
  kTrainAll,  // train on all text; labels still come from training years only
};

struct InputPaths {
  std::string transcripts;
  std::string prices;           // stocks and indices may share one file
  std::string indices;          // optional extra price file
  std::string recommendations;  // optional
  std::string fundamentals;     // optional
  std::string lexicon;          // empty: bundled lexicon
  std::string word_vectors;     // empty: seeded fallback vectors
};

struct SplitRule {
  int train_max_year = 2018;
  int test_year = 2019;
  // Training examples from the latest training year serve as validation for
  // early stopping and Doc2Vec dimension selection. When that year holds
  // fewer than this fraction of training rows (or all of them), the last
  // fraction of rows in date order is used instead.
  double validation_fraction = 0.2;
};

struct GraphSettings {
  int window = kDefaultGraphWindow;
  std::size_t feature_dim = kDefaultWordFeatureDim;
  std::uint64_t feature_seed = kDefaultFeatureSeed;
};

struct GnnSettings {
  int steps = kDefaultGnnSteps;
  std::size_t graph_embedding_dim = kDefaultGraphEmbeddingDim;
  std::size_t head_hidden = kDefaultGraphEmbeddingDim;
  std::size_t batch_size = kDefaultBatchSize;
  double learning_rate = 0.05;
  int epochs = 50;
  int patience = 5;
  // Dimension of the concatenated Doc2Vec vector; 0 disables it.
  std::size_t doc_dim = 300;
};

struct Doc2VecSettings {
  std::vector<std::size_t> dims = {100, 200, 300};
  double learning_rate = kDefaultDoc2VecLearningRate;
  int negatives = kDefaultNegatives;
  std::size_t min_count = kDefaultMinCount;
  int window = kDefaultDoc2VecWindow;
  int epochs = 20;
  int infer_steps = 20;
  std::uint64_t seed = 0;
  Doc2VecMode mode = Doc2VecMode::kInfer;
};

struct ClassifierSettings {
  HeadConfig head;  // learning rates, iterations; kind and seed set per job
  std::vector<std::size_t> mlp_hidden_by_dim = {32, 64, 128};  // for dims 100/200/300
  std::size_t se_hidden = 16;
  MlpOutput de_output = MlpOutput::kSigmoid;
  MlpOutput se_output = MlpOutput::kSoftmax;
};

struct ExperimentConfig {
  LabelKind label = LabelKind::value();
  int max_gap_days = kDefaultMaxGapDays;
  std::vector<Sector> sectors = {Sector::kFinancial, Sector::kHealthcare,
                                 Sector::kBasicMaterials, Sector::kServices,
                                 Sector::kTechnology};
  std::vector<Method> methods = {Method::kStockGnn, Method::kDeSvm, Method::kDeLogReg,
                                 Method::kDeMlp};
  SplitRule split;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t min_examples = 20;
  int min_seeds = 10;  // fewer seeds are allowed but flagged in the table
  unsigned threads = 1;
  InputPaths inputs;
  GraphSettings graph;
  GnnSettings gnn;
  Doc2VecSettings doc2vec;
  ClassifierSettings classifier;

  // Throws kInvalidConfig.
  void validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected. Relative input
// paths resolve against `base_dir`. Throws kInvalidConfig, kSchemaViolation.
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::string& base_dir = "");
ExperimentConfig load_experiment_config(const std::string& path);
// Fully resolved config as canonical JSON (fixed key order, compact).
std::string experiment_config_to_json(const ExperimentConfig& config, int indent = -1);

}  // namespace ecpipe
