#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecpipe/autodiff.h"
#include "ecpipe/matrix.h"
#include "ecpipe/rng.h"
#include "ecpipe/textgraph.h"

namespace ecpipe {

inline constexpr int kDefaultGnnSteps = 2;
inline constexpr std::size_t kDefaultGraphEmbeddingDim = 96;
inline constexpr std::size_t kDefaultBatchSize = 128;
inline constexpr std::size_t kDefaultWordFeatureDim = 300;

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
Matrix xavier_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

using ParamVisitor = std::function<void(std::string_view name, Matrix& value)>;
using ConstParamVisitor =
    std::function<void(std::string_view name, const Matrix& value)>;

// Weights of the gated propagation step. Node states are row vectors, so every
// "W a" is computed as `a * W` with W of shape d x d; biases are 1 x d.
struct GatedGnnParams {
  Matrix w_a;
  Matrix w_x, w_r, w_z;
  Matrix u_x, u_r, u_z;
  Matrix b_x, b_r, b_z;

  static GatedGnnParams zeros(std::size_t dim);
  static GatedGnnParams initialized(std::size_t dim, Rng& rng);

  std::size_t dim() const { return w_a.rows(); }
  void for_each(const ParamVisitor& f);
  void for_each(const ConstParamVisitor& f) const;
};

enum class Activation { kTanh, kRelu };

// One hidden layer: act(x W1 + b1) W2 + b2.
struct Mlp {
  Matrix w1, b1, w2, b2;
  Activation hidden = Activation::kTanh;

  static Mlp zeros(std::size_t in, std::size_t hidden, std::size_t out,
                   Activation act = Activation::kTanh);
  static Mlp initialized(std::size_t in, std::size_t hidden, std::size_t out,
                         Rng& rng, Activation act = Activation::kTanh);

  std::size_t in_dim() const { return w1.rows(); }
  std::size_t hidden_dim() const { return w1.cols(); }
  std::size_t out_dim() const { return w2.cols(); }

  void for_each(std::string_view prefix, const ParamVisitor& f);
  void for_each(std::string_view prefix, const ConstParamVisitor& f) const;

  Matrix forward(const Matrix& x) const;
  autodiff::Var record(autodiff::Tape& tape, autodiff::Var x,
                       Mlp* grad = nullptr) const;
};

// Two independent branches over node states: sigmoid(gate(z)) * tanh(value(z)).
struct AggregatorParams {
  Mlp gate;
  Mlp value;

  static AggregatorParams initialized(std::size_t dim, std::size_t out,
                                      Rng& rng);
  std::size_t out_dim() const { return gate.out_dim(); }
};

// Graph-of-words classifier: gated propagation, gated mean aggregation,
// optional concatenation of a document vector, MLP head with two logits.
struct StockGnnModel {
  GatedGnnParams gnn;
  AggregatorParams aggregator;
  Mlp head;
  int steps = kDefaultGnnSteps;

  std::size_t feature_dim() const { return gnn.dim(); }
  std::size_t doc_dim() const { return head.in_dim() - aggregator.out_dim(); }

  void for_each(const ParamVisitor& f);
  void for_each(const ConstParamVisitor& f) const;
  // Same shapes, all zeros.
  StockGnnModel zeros_like() const;
  std::size_t parameter_count() const;
};

struct StockGnnShape {
  std::size_t feature_dim = kDefaultWordFeatureDim;
  std::size_t graph_embedding_dim = kDefaultGraphEmbeddingDim;
  std::size_t doc_dim = 0;
  std::size_t head_hidden = kDefaultGraphEmbeddingDim;
  int steps = kDefaultGnnSteps;
};

StockGnnModel init_stock_gnn(const StockGnnShape& shape, std::uint64_t seed);

// One propagation step over all nodes:
//   a = A z W_a
//   x = sigmoid(a W_x + z U_x + b_x)
//   r = sigmoid(a W_r + z U_r + b_r)
//   h = tanh(a W_z + (r * z) U_z + b_z)
//   z' = h + z * (1 - x)
Matrix gated_gnn_step(const Matrix& z_prev, const Adjacency& adjacency,
                      const GatedGnnParams& params);

// k-fold gated_gnn_step starting from the graph's node features.
Matrix run_gnn(const TextGraph& graph, const GatedGnnParams& params, int steps);

// Mean over nodes of sigmoid(gate(z_v)) * tanh(value(z_v)). kEmptyGraph on
// zero nodes.
std::vector<double> aggregate(const Matrix& z_final,
                              const AggregatorParams& params);

// softmax(head([z_G, doc_embedding])). Pass an empty span when the model has
// no document input.
std::array<double, 2> forward_classify(const TextGraph& graph,
                                       const StockGnnModel& model,
                                       std::span<const double> doc_embedding);

struct GraphExample {
  TextGraph graph;
  std::vector<double> doc_embedding;
  int label = 0;
};

// Cross-entropy of one example; when `grad` is non-null its parameters are
// incremented by seed * d(loss)/d(param).
double example_loss(const StockGnnModel& model, const GraphExample& example,
                    StockGnnModel* grad = nullptr, double seed = 1.0);

struct GnnTrainConfig {
  double learning_rate = 0.05;
  int epochs = 50;
  std::size_t batch_size = kDefaultBatchSize;
  int patience = 5;  // early stop on validation loss; ignored without one
  std::uint64_t seed = 0;
  unsigned threads = 1;
  StockGnnShape shape;
};

struct GnnTrainResult {
  StockGnnModel model;
  std::vector<double> train_loss;       // mean batch loss per epoch
  std::vector<double> validation_loss;  // empty without validation data
  int best_epoch = 0;
};

// Minibatch gradient descent on mean cross-entropy. The example order is
// shuffled per epoch from `seed`; per-example gradients are summed in index
// order so results do not depend on `threads`. Throws kNonFiniteLoss,
// kEmptyInput, kShapeMismatch.
GnnTrainResult train_stock_gnn(std::span<const GraphExample> train,
                               std::span<const GraphExample> validation,
                               const GnnTrainConfig& config);

double mean_loss(const StockGnnModel& model,
                 std::span<const GraphExample> examples);

// Checkpoint format: JSON object
//   {"format": "ecpipe.stockgnn", "version": 1, "seed": ..., "config": {...},
//    "steps": k, "parameters": {name: {"rows": r, "cols": c, "data": [...]}}}
// with parameters in for_each() order. Doubles are written shortest
// round-trip, so save -> load -> save is byte-identical.
std::string checkpoint_to_string(const StockGnnModel& model,
                                 const GnnTrainConfig& config);
StockGnnModel checkpoint_from_string(std::string_view text,
                                     GnnTrainConfig* config = nullptr);
void save_checkpoint(const std::string& path, const StockGnnModel& model,
                     const GnnTrainConfig& config);
StockGnnModel load_checkpoint(const std::string& path,
                              GnnTrainConfig* config = nullptr);

}  // namespace ecpipe
