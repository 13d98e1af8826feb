#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "ecpipe/docembed.h"
#include "ecpipe/econometrics.h"
#include "ecpipe/neural.h"
#include "ecpipe/rng.h"
#include "ecpipe/synthetic.h"
#include "ecpipe/textgraph.h"

namespace ecpipe {
namespace {

TokenStream document(std::size_t length, std::uint64_t seed) {
  return marker_documents(1, length, seed).front().first;
}

void BM_BuildTextGraph(benchmark::State& state) {
  const TokenStream tokens = document(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    TextGraph g = build_text_graph(tokens, kDefaultGraphWindow);
    benchmark::DoNotOptimize(g);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildTextGraph)->Arg(200)->Arg(2000);

GraphExample gnn_example(std::size_t dim) {
  GraphExample ex;
  ex.graph = build_text_graph(document(400, 2));
  attach_fallback_features(ex.graph, dim);
  ex.label = 1;
  return ex;
}

void BM_GnnForward(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const GraphExample ex = gnn_example(dim);
  const StockGnnModel model = init_stock_gnn(
      {.feature_dim = dim, .graph_embedding_dim = dim, .head_hidden = dim}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(example_loss(model, ex));
}
BENCHMARK(BM_GnnForward)->Arg(16)->Arg(96);

void BM_GnnForwardBackward(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const GraphExample ex = gnn_example(dim);
  const StockGnnModel model = init_stock_gnn(
      {.feature_dim = dim, .graph_embedding_dim = dim, .head_hidden = dim}, 3);
  StockGnnModel grad = model.zeros_like();
  for (auto _ : state) benchmark::DoNotOptimize(example_loss(model, ex, &grad));
}
BENCHMARK(BM_GnnForwardBackward)->Arg(16)->Arg(96);

void BM_PvdmEpoch(benchmark::State& state) {
  std::vector<TokenStream> docs;
  std::vector<std::string> ids;
  for (const auto& [tokens, label] : marker_documents(200, 200, 4)) {
    docs.push_back(tokens);
    ids.push_back("d" + std::to_string(ids.size()));
  }
  Doc2VecConfig config;
  config.dim = static_cast<std::size_t>(state.range(0));
  config.epochs = 1;
  config.learning_rate = 0.025;
  for (auto _ : state) benchmark::DoNotOptimize(train_pvdm(docs, ids, config));
  state.SetItemsProcessed(state.iterations() * 200 * 200);
}
BENCHMARK(BM_PvdmEpoch)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_FitLogit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t kCols = 8;
  Rng rng(5);
  Design d;
  d.x = Matrix(n, kCols);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < kCols; ++j) {
      d.x(i, j) = j == 0 ? 1.0 : rng.normal();
      eta += 0.3 * d.x(i, j);
    }
    d.y.push_back(rng.uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1 : 0);
  }
  for (std::size_t j = 0; j < kCols; ++j) d.columns.push_back("x" + std::to_string(j));
  for (auto _ : state) benchmark::DoNotOptimize(fit_logit(d));
}
BENCHMARK(BM_FitLogit)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace ecpipe

BENCHMARK_MAIN();
