#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecpipe/matrix.h"
#include "ecpipe/neural.h"

namespace ecpipe {

enum class FeatureSource { kEmbedding, kSentiment, kSalesEps, kCombined };

std::string_view feature_source_name(FeatureSource source);

struct FeatureMatrix {
  Matrix x;  // n x p
  std::vector<int> labels;
  FeatureSource source = FeatureSource::kEmbedding;

  // Throws kEmptyInput, kShapeMismatch, kSchemaViolation (non-finite entry or
  // a label outside {0, 1}).
  void validate() const;
};

// Per-column z-scoring. Columns with zero variance keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x);
  static Standardizer identity(std::size_t cols);
  Matrix apply(const Matrix& x) const;
};

enum class HeadKind { kLogReg, kLinearSvm, kMlp };
enum class MlpOutput { kSigmoid, kSoftmax };

std::string_view head_kind_name(HeadKind kind);
HeadKind parse_head_kind(std::string_view text);

// Hidden width of the MLP head: 16 for sales/EPS features, otherwise keyed on
// input width (<=100 -> 32, <=200 -> 64, larger -> 128).
std::size_t default_mlp_hidden(std::size_t input_dim, FeatureSource source);

struct HeadConfig {
  HeadKind kind = HeadKind::kLogReg;
  double learning_rate = 0.5;
  int max_iterations = 5000;  // full-batch steps for logreg and svm
  double tolerance = 1e-10;   // logreg stops when the gradient max-norm drops below
  double l2 = 0.0;            // svm defaults to 1e-3 when this is 0
  // MLP
  std::size_t hidden = 0;  // 0 -> default_mlp_hidden
  MlpOutput output = MlpOutput::kSigmoid;
  int epochs = 200;
  std::size_t batch_size = 32;
  double mlp_learning_rate = 0.1;
  bool standardize = true;
  std::uint64_t seed = 0;
};

struct TrainedHead {
  HeadKind kind = HeadKind::kLogReg;
  Standardizer standardizer;
  std::vector<double> weights;  // logreg, svm; in standardized units
  double bias = 0.0;
  Mlp mlp;  // kMlp only
  MlpOutput output = MlpOutput::kSigmoid;
  FeatureSource source = FeatureSource::kEmbedding;

  std::size_t input_dim() const { return standardizer.mean.size(); }
  // Logreg/svm weights mapped back to raw feature units; element 0 is the
  // intercept.
  std::vector<double> raw_coefficients() const;
};

// Throws kDegenerateLabels when only one class is present, kInvalidConfig.
TrainedHead fit_head(const FeatureMatrix& data, const HeadConfig& config);

struct Predictions {
  std::vector<int> labels;
  // Probability of class 1 for logreg/mlp, margin for svm.
  std::vector<double> scores;
};

// Probability >= 0.5 (or margin >= 0) predicts class 1. Throws kShapeMismatch.
Predictions predict(const TrainedHead& head, const Matrix& x);

struct ClassMetrics {
  int label = 0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t support = 0;    // true count
  std::size_t predicted = 0;  // predicted count
};

struct Evaluation {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  std::vector<ClassMetrics> per_class;  // sorted by label
};

// Classes are the union of labels seen in truth and predictions. A class never
// predicted has precision 0; a class absent from truth has recall 0.
// Throws kEmptyInput, kShapeMismatch.
Evaluation evaluate(std::span<const int> predicted, std::span<const int> truth);

}  // namespace ecpipe
