#include "ecpipe/neural.h"

#include <cmath>
#include <gtest/gtest.h>
#include <numeric>

#include "neural_support.h"
#include "oracles.h"
#include "test_util.h"

namespace ecpipe {
namespace {

using testing::error_code_of;
using testing::random_graph;
using testing::randomize;
using testing::to_oracle;

TEST(Xavier, WithinBound) {
  Rng rng(1);
  const Matrix w = xavier_uniform(30, 10, rng);
  const double bound = std::sqrt(6.0 / 40.0);
  EXPECT_LE(max_abs(w), bound);
  EXPECT_GT(max_abs(w), 0.5 * bound);
}

TEST(GatedStep, ZeroParamsHalveStateEachStep) {
  Rng rng(2);
  auto g = random_graph(5, 4, rng);
  const auto zero = GatedGnnParams::zeros(4);
  Matrix expect = g.node_features;
  for (int k = 1; k <= 3; ++k) {
    expect *= 0.5;
    EXPECT_EQ(run_gnn(g, zero, k), expect) << "k=" << k;
  }
}

TEST(GatedStep, MatchesLoopOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.index(5), d = 1 + rng.index(4);
    auto g = random_graph(n, d, rng);
    auto params = GatedGnnParams::initialized(d, rng);
    params.for_each([&](std::string_view, Matrix& m) {
      for (double& v : m.values()) v = rng.uniform(-1, 1);
    });
    const auto got = gated_gnn_step(g.node_features, g.adjacency, params);
    const auto want = oracle::gnn_step(to_oracle(g.node_features), to_oracle(g.adjacency.dense()),
                                       to_oracle(params));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) EXPECT_NEAR(got(i, j), want[i][j], 1e-12);
  }
}

TEST(GatedStep, IsolatedNodeIgnoresNeighbors) {
  Rng rng(4);
  TextGraph g;
  g.nodes = {"a", "b"};
  g.adjacency = Adjacency(2);
  g.node_features = Matrix{{0.3, -0.2}, {0.9, 0.1}};
  const auto params = GatedGnnParams::initialized(2, rng);
  const auto z = gated_gnn_step(g.node_features, g.adjacency, params);
  g.node_features(1, 0) = -5.0;
  const auto z2 = gated_gnn_step(g.node_features, g.adjacency, params);
  EXPECT_EQ(z(0, 0), z2(0, 0));
  EXPECT_EQ(z(0, 1), z2(0, 1));
}

TEST(Aggregate, MatchesOracleAndRejectsEmpty) {
  Rng rng(5);
  const auto agg = AggregatorParams::initialized(3, 4, rng);
  Matrix z(6, 3);
  for (double& v : z.values()) v = rng.uniform(-2, 2);
  const auto got = aggregate(z, agg);
  const auto want = oracle::aggregate(to_oracle(z), to_oracle(agg.gate), to_oracle(agg.value));
  ASSERT_EQ(got.size(), 4u);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(got[j], want[j], 1e-12);
    EXPECT_LT(std::abs(got[j]), 1.0);
  }
  EXPECT_EQ(error_code_of([&] { aggregate(Matrix(0, 3), agg); }), ErrorCode::kEmptyGraph);
}

TEST(Classify, SoftmaxOfKnownLogits) {
  Rng rng(6);
  auto model = init_stock_gnn({.feature_dim = 2, .graph_embedding_dim = 2, .head_hidden = 2}, 1);
  model.head.w2.fill(0.0);
  model.head.b2 = Matrix{{0.0, std::log(3.0)}};
  auto g = random_graph(3, 2, rng);
  const auto p = forward_classify(g, model, {});
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.75, 1e-15);
}

TEST(Classify, ProbabilitiesSumToOne) {
  Rng rng(7);
  auto model = init_stock_gnn({.feature_dim = 3, .graph_embedding_dim = 4, .doc_dim = 2, .head_hidden = 5}, 2);
  for (int t = 0; t < 20; ++t) {
    auto g = random_graph(1 + rng.index(6), 3, rng);
    const std::vector<double> doc = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto p = forward_classify(g, model, doc);
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
    EXPECT_GT(p[0], 0.0);
    EXPECT_GT(p[1], 0.0);
  }
}

TEST(Classify, DocDimensionMismatch) {
  Rng rng(8);
  auto model = init_stock_gnn({.feature_dim = 3, .graph_embedding_dim = 4, .doc_dim = 2, .head_hidden = 5}, 2);
  auto g = random_graph(3, 3, rng);
  EXPECT_EQ(error_code_of([&] { forward_classify(g, model, {}); }), ErrorCode::kShapeMismatch);
}

TEST(Classify, PermutationInvariant) {
  Rng rng(9);
  auto model = init_stock_gnn({.feature_dim = 3, .graph_embedding_dim = 4, .head_hidden = 4}, 3);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + rng.index(6);
    auto g = random_graph(n, 3, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    TextGraph h;
    h.nodes.resize(n);
    h.adjacency = g.adjacency.permuted(perm);
    h.node_features = Matrix(n, 3);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 3; ++j) h.node_features(perm[i], j) = g.node_features(i, j);
    const auto a = forward_classify(g, model, {}), b = forward_classify(h, model, {});
    EXPECT_NEAR(a[0], b[0], 1e-12);
  }
}

TEST(Gradients, MatchCentralDifferences) {
  Rng rng(10);
  for (int t = 0; t < 5; ++t) {
    auto model = init_stock_gnn({.feature_dim = 3, .graph_embedding_dim = 3, .doc_dim = 2, .head_hidden = 3}, t);
    randomize(model, rng);
    GraphExample ex{random_graph(2 + rng.index(4), 3, rng), {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                    static_cast<int>(rng.index(2))};
    EXPECT_LT(testing::gradient_check(model, ex), 1e-4) << "instance " << t;
  }
}

std::vector<GraphExample> tiny_dataset(std::size_t count, Rng& rng) {
  std::vector<GraphExample> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto g = random_graph(3 + rng.index(3), 4, rng);
    out.push_back({std::move(g), {}, static_cast<int>(i % 2)});
  }
  return out;
}

TEST(Training, MemorizesSmallSet) {
  Rng rng(11);
  const auto data = tiny_dataset(12, rng);
  GnnTrainConfig cfg;
  cfg.shape = {.feature_dim = 4, .graph_embedding_dim = 8, .head_hidden = 8};
  cfg.learning_rate = 0.5;
  cfg.epochs = 300;
  cfg.batch_size = 4;
  const auto result = train_stock_gnn(data, {}, cfg);
  std::size_t correct = 0;
  for (const auto& ex : data) {
    const auto p = forward_classify(ex.graph, result.model, {});
    correct += (p[1] > p[0] ? 1 : 0) == ex.label;
  }
  EXPECT_EQ(correct, data.size());
  EXPECT_LT(result.train_loss.back(), result.train_loss.front());
}

TEST(Training, DeterministicAcrossThreads) {
  Rng rng(12);
  const auto data = tiny_dataset(10, rng);
  GnnTrainConfig cfg;
  cfg.shape = {.feature_dim = 4, .graph_embedding_dim = 4, .head_hidden = 4};
  cfg.epochs = 3;
  cfg.batch_size = 4;
  cfg.seed = 5;
  const auto one = train_stock_gnn(data, {}, cfg);
  cfg.threads = 3;
  const auto three = train_stock_gnn(data, {}, cfg);
  EXPECT_EQ(checkpoint_to_string(one.model, cfg), checkpoint_to_string(three.model, cfg));
}

TEST(Training, EarlyStoppingKeepsBestEpoch) {
  Rng rng(13);
  const auto train = tiny_dataset(8, rng);
  auto val = tiny_dataset(8, rng);
  for (auto& ex : val) ex.label = 1 - ex.label;
  GnnTrainConfig cfg;
  cfg.shape = {.feature_dim = 4, .graph_embedding_dim = 4, .head_hidden = 4};
  cfg.learning_rate = 0.5;
  cfg.epochs = 100;
  cfg.patience = 2;
  cfg.batch_size = 4;
  const auto r = train_stock_gnn(train, val, cfg);
  ASSERT_FALSE(r.validation_loss.empty());
  const auto best = std::min_element(r.validation_loss.begin(), r.validation_loss.end());
  EXPECT_EQ(r.best_epoch, static_cast<int>(best - r.validation_loss.begin()));
  EXPECT_NEAR(mean_loss(r.model, val), *best, 1e-12);
}

TEST(Training, Errors) {
  GnnTrainConfig cfg;
  cfg.shape = {.feature_dim = 4, .graph_embedding_dim = 4, .head_hidden = 4};
  EXPECT_EQ(error_code_of([&] { train_stock_gnn({}, {}, cfg); }), ErrorCode::kEmptyInput);
  Rng rng(14);
  auto data = tiny_dataset(2, rng);
  data[1].doc_embedding = {1.0};
  EXPECT_EQ(error_code_of([&] { train_stock_gnn(data, {}, cfg); }), ErrorCode::kShapeMismatch);
}

TEST(Checkpoint, RoundTripIsByteIdentical) {
  auto model = init_stock_gnn({.feature_dim = 3, .graph_embedding_dim = 4, .doc_dim = 2, .head_hidden = 5}, 4);
  GnnTrainConfig cfg;
  cfg.seed = 4;
  cfg.shape = {.feature_dim = 3, .graph_embedding_dim = 4, .doc_dim = 2, .head_hidden = 5};
  const std::string text = checkpoint_to_string(model, cfg);
  GnnTrainConfig back;
  const auto loaded = checkpoint_from_string(text, &back);
  EXPECT_EQ(checkpoint_to_string(loaded, back), text);
  EXPECT_EQ(back.seed, 4u);
  EXPECT_EQ(error_code_of([] { checkpoint_from_string("{\"format\":\"x\"}"); }), ErrorCode::kSchemaViolation);
}

}  // namespace
}  // namespace ecpipe
