// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Tolerances and runtime limits are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "ecpipe/classifiers.h"
#include "ecpipe/csv.h"
#include "ecpipe/econometrics.h"
#include "ecpipe/experiment_config.h"
#include "ecpipe/harness.h"
#include "ecpipe/neural.h"
#include "ecpipe/recommendations.h"
#include "ecpipe/synthetic.h"
#include "label_support.h"
#include "neural_support.h"
#include "oracles.h"
#include "pipeline_support.h"

namespace ecpipe {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) { return format_number(v, 6); }

// 1. Label functions against naive transliterations.
Outcome label_oracles() {
  Rng rng(1);
  int agree = 0;
  constexpr int kSeries = 1000;
  for (int trial = 0; trial < kSeries; ++trial) {
    const auto m = testing::random_market(rng, 12);
    const long last = m.stock_days.days.back();
    const long d = static_cast<long>(rng.index(static_cast<std::uint64_t>(last + 2)));
    const int k = 3 + static_cast<int>(rng.index(3));
    agree += testing::compare_labels(m, d, 0.05, k).all();
  }
  return {agree == kSeries, std::to_string(agree) + "/" + std::to_string(kSeries) + " series agree"};
}

// 2. Gated propagation: zero parameters and the loop oracle.
Outcome gnn_correctness() {
  Rng rng(2);
  bool zero_ok = true;
  for (int t = 0; t < 100; ++t) {
    auto g = testing::random_graph(1 + rng.index(8), 1 + rng.index(6), rng);
    Matrix expect = g.node_features;
    expect *= 0.25;
    zero_ok &= run_gnn(g, GatedGnnParams::zeros(g.node_features.cols()), 2) == expect;
  }
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.index(5), d = 1 + rng.index(4);
    auto g = testing::random_graph(n, d, rng);
    auto p = GatedGnnParams::zeros(d);
    p.for_each([&](std::string_view, Matrix& m) {
      for (double& v : m.values()) v = rng.uniform(-1, 1);
    });
    const Matrix got = run_gnn(g, p, 2);
    const auto w = testing::to_oracle(p);
    const auto adj = testing::to_oracle(g.adjacency.dense());
    const auto want = oracle::gnn_step(oracle::gnn_step(testing::to_oracle(g.node_features), adj, w), adj, w);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) worst = std::max(worst, std::abs(got(i, j) - want[i][j]));
  }
  return {zero_ok && worst <= 1e-12,
          std::string("zero-param exact: ") + (zero_ok ? "yes" : "no") + ", max oracle gap " + fmt(worst)};
}

// 3. Full-model gradients against central differences.
Outcome gradient_checks() {
  Rng rng(3);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const std::size_t d = 2 + rng.index(3);
    auto model = init_stock_gnn({.feature_dim = d, .graph_embedding_dim = 3, .doc_dim = 2, .head_hidden = 3},
                                static_cast<std::uint64_t>(t));
    testing::randomize(model, rng);
    GraphExample ex{testing::random_graph(2 + rng.index(4), d, rng),
                    {rng.uniform(-1, 1), rng.uniform(-1, 1)}, static_cast<int>(rng.index(2))};
    worst = std::max(worst, testing::gradient_check(model, ex, 1e-5));
  }
  return {worst < 1e-4, "max relative error " + fmt(worst)};
}

// 4. Graph embedding is invariant to node relabeling.
Outcome permutation_invariance() {
  Rng rng(4);
  auto model = init_stock_gnn({.feature_dim = 4, .graph_embedding_dim = 6, .head_hidden = 4}, 4);
  testing::randomize(model, rng);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.index(10);
    auto g = testing::random_graph(n, 4, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    TextGraph h;
    h.nodes.resize(n);
    h.adjacency = g.adjacency.permuted(perm);
    h.node_features = Matrix(n, 4);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 4; ++j) h.node_features(perm[i], j) = g.node_features(i, j);
    const auto a = aggregate(run_gnn(g, model.gnn, model.steps), model.aggregator);
    const auto b = aggregate(run_gnn(h, model.gnn, model.steps), model.aggregator);
    for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  }
  return {worst < 1e-12, "max |dz_G| " + fmt(worst)};
}

// Seeded uniform vectors in [-1, 1], the scale of typical pre-trained word
// vectors, standing in for a real embedding file.
void attach_stand_in_features(TextGraph& g, std::size_t dim) {
  attach_fallback_features(g, dim, 17);
  g.node_features *= 1.0 / kFallbackFeatureRange;
}

constexpr std::size_t kDim = 16;

std::vector<GraphExample> marker_graphs(std::size_t count, std::uint64_t seed, bool shuffled) {
  std::vector<GraphExample> out;
  for (auto& [tokens, label] : marker_documents(count, 40, seed, shuffled)) {
    TextGraph g = build_text_graph(tokens, 3);
    attach_stand_in_features(g, kDim);
    out.push_back({std::move(g), {}, label});
  }
  return out;
}

GnnTrainConfig small_gnn(std::uint64_t seed, int epochs, double lr) {
  GnnTrainConfig c;
  c.shape = {.feature_dim = kDim, .graph_embedding_dim = kDim, .head_hidden = kDim};
  c.learning_rate = lr;
  c.batch_size = 16;
  c.epochs = epochs;
  c.seed = seed;
  return c;
}

Evaluation evaluate_gnn(const StockGnnModel& model, std::span<const GraphExample> data) {
  std::vector<int> pred, truth;
  for (const auto& ex : data) {
    const auto p = forward_classify(ex.graph, model, ex.doc_embedding);
    pred.push_back(p[1] >= 0.5 ? 1 : 0);
    truth.push_back(ex.label);
  }
  return evaluate(pred, truth);
}

// 5. Memorization, planted signal, and the permutation null.
Outcome end_to_end() {
  // Twenty synthetic transcripts with arbitrary alternating labels.
  const auto synthetic = generate_synthetic({.seed = 5, .words_per_doc = 60});
  std::vector<GraphExample> tiny;
  for (int i = 0; i < 20; ++i) {
    TextGraph g = build_text_graph(tokenize(synthetic.transcripts[i].text), 3);
    attach_stand_in_features(g, kDim);
    tiny.push_back({std::move(g), {}, i % 2});
  }
  const auto memo = train_stock_gnn(tiny, {}, small_gnn(5, 200, 0.2));
  const double memo_acc = evaluate_gnn(memo.model, tiny).accuracy;

  const auto planted = marker_graphs(400, 51, false);
  const std::span<const GraphExample> all(planted);
  const auto fit = train_stock_gnn(all.first(300), {}, small_gnn(6, 30, 0.2));
  const double planted_acc = evaluate_gnn(fit.model, all.last(100)).accuracy;

  double recall_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto null = marker_graphs(400, 100 + seed, true);
    const std::span<const GraphExample> ns(null);
    const auto m = train_stock_gnn(ns.first(300), {}, small_gnn(seed, 30, 0.2));
    recall_sum += evaluate_gnn(m.model, ns.last(100)).macro_recall;
  }
  const double null_recall = recall_sum / 10.0;
  const bool ok = memo_acc == 1.0 && planted_acc >= 0.9 && std::abs(null_recall - 0.5) <= 0.1;
  return {ok, "train acc (20 docs) " + fmt(memo_acc) + ", planted test acc " + fmt(planted_acc) +
                  ", shuffled mean macro recall " + fmt(null_recall)};
}

// 6. A constant predictor has macro recall exactly one half.
Outcome constant_classifier() {
  Rng rng(6);
  int exact = 0;
  constexpr int kSets = 1000;
  for (int t = 0; t < kSets; ++t) {
    const std::size_t n = 2 + rng.index(200);
    std::vector<int> truth(n);
    for (auto& y : truth) y = static_cast<int>(rng.index(2));
    truth[0] = 0;
    truth[1] = 1;
    const std::vector<int> pred(n, static_cast<int>(rng.index(2)));
    exact += evaluate(pred, truth).macro_recall == 0.5;
  }
  return {exact == kSets, std::to_string(exact) + "/" + std::to_string(kSets) + " sets give exactly 0.5"};
}

// 7. Logit: closed form, coverage, nested-grid monotonicity.
Outcome econometrics() {
  std::vector<RegressionRow> flat(100);
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i].labels["y"] = i < 50 ? 1 : 0;
  const auto intercept = fit_logit(build_design(flat, {"m0", "y", {}, {}}));
  const double bic_expect = std::log(100.0) - 2.0 * 100.0 * std::log(0.5);
  const double bic_gap = std::abs(intercept.bic - bic_expect);

  Rng rng(7);
  int covered = 0;
  const double beta[] = {0.5, -1.0};
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<RegressionRow> rows(20000);
    for (auto& r : rows) {
      const double x = rng.normal();
      r.continuous["x"] = x;
      r.labels["y"] = rng.bernoulli(oracle::sigmoid(beta[0] + beta[1] * x)) ? 1 : 0;
    }
    const auto fit = fit_logit(build_design(rows, {"m", "y", {"x"}, {}}));
    bool all = true;
    for (int j = 0; j < 2; ++j)
      all &= std::abs(fit.coefficients[j].estimate - beta[j]) <= 3.0 * fit.coefficients[j].std_error;
    covered += all;
  }

  const auto data = generate_synthetic({.seed = 7});
  const auto inputs = testing::inputs_from(data);
  const auto rows = build_regression_rows(ExperimentConfig{}, inputs);
  int grids = 0, monotone = 0;
  for (const char* dep : {"y_v", "y_s", "y_I5"}) {
    for (auto grid : {sentiment_grid(dep), recommendation_grid(dep)}) {
      grid.common_rows = true;
      monotone += loglik_monotone(run_model_grid(rows, grid));
      ++grids;
    }
  }
  const bool ok = bic_gap <= 1e-6 && covered >= 95 && monotone == grids;
  return {ok, "BIC gap " + fmt(bic_gap) + ", coverage " + std::to_string(covered) + "/100, monotone grids " +
                  std::to_string(monotone) + "/" + std::to_string(grids)};
}

// 8. Evaluation metrics against brute force.
Outcome metric_oracle() {
  Rng rng(8);
  int exact = 0;
  constexpr int kPairs = 1000;
  for (int t = 0; t < kPairs; ++t) {
    const std::size_t n = 1 + rng.index(100);
    std::vector<int> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng.index(2));
      truth[i] = static_cast<int>(rng.index(2));
    }
    const auto got = evaluate(pred, truth);
    const auto want = oracle::metrics(pred, truth);
    exact += got.accuracy == want.accuracy && got.macro_precision == want.macro_precision &&
             got.macro_recall == want.macro_recall;
  }
  return {exact == kPairs, std::to_string(exact) + "/" + std::to_string(kPairs) + " pairs identical"};
}

std::string run_fingerprint(const ExperimentConfig& cfg, const PipelineInputs& inputs) {
  const auto result = run_experiment(cfg, inputs);
  std::string out = result.table.to_table().to_csv() + runs_table(result.runs).to_csv() +
                    labels_table(result.dataset).to_csv();
  for (const auto& [name, text] : result.checkpoints) out += name + "\n" + text + "\n";
  auto grid = sentiment_grid("y_v");
  grid.common_rows = true;
  out += regression_table(run_model_grid(build_regression_rows(cfg, inputs), grid)).to_csv();
  return out;
}

// 9. Identical config and seeds give identical bytes.
Outcome determinism() {
  auto spec = testing::small_spec(9);
  spec.tickers_per_sector = 6;
  const auto data = generate_synthetic(spec);
  const auto inputs = testing::inputs_from(data);
  auto cfg = testing::small_config();
  cfg.methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
  const std::string first = run_fingerprint(cfg, inputs);
  const std::string second = run_fingerprint(cfg, inputs);
  return {first == second && !first.empty(),
          std::to_string(first.size()) + " bytes, " + (first == second ? "identical" : "different")};
}

// 10. Shipped defaults.
Outcome config_defaults() {
  const ExperimentConfig c;
  std::vector<std::string> wrong;
  auto check = [&](bool ok, const char* what) {
    if (!ok) wrong.emplace_back(what);
  };
  check(LabelKind::shock().tau == 0.05, "tau");
  check(kDefaultShockTau == 0.05, "default tau");
  check(c.graph.window == 3, "window");
  check(c.gnn.steps == 2, "hops");
  check(c.gnn.batch_size == 128, "batch");
  check(c.doc2vec.learning_rate == 0.001, "doc2vec lr");
  check(c.doc2vec.negatives == 5, "negatives");
  check(c.doc2vec.min_count == 2, "min count");
  check(c.gnn.graph_embedding_dim == 96, "graph embedding");
  check(c.classifier.mlp_hidden_by_dim == std::vector<std::size_t>{32, 64, 128}, "MLP widths");
  check(c.classifier.se_hidden == 16, "SE width");
  check(default_mlp_hidden(100, FeatureSource::kEmbedding) == 32 &&
            default_mlp_hidden(200, FeatureSource::kEmbedding) == 64 &&
            default_mlp_hidden(300, FeatureSource::kEmbedding) == 128 &&
            default_mlp_hidden(4, FeatureSource::kSalesEps) == 16,
        "head widths");
  check(c.doc2vec.dims == std::vector<std::size_t>{100, 200, 300}, "doc2vec dims");
  check(experiment_config_to_json(parse_experiment_config("{}")) == experiment_config_to_json(c), "parse {}");
  std::string detail = wrong.empty() ? "all defaults match" : "mismatch:";
  for (const auto& w : wrong) detail += " " + w;
  return {wrong.empty(), detail};
}

// 11. MAR worked example and inertness of out-of-window records.
Outcome mar() {
  const Date call = parse_date("2015-10-01");
  std::vector<RecommendationRecord> recs;
  for (int i = 0; i < 6; ++i) recs.push_back({"XYZ", call - std::chrono::days(3 + 4 * i), Rating::kHold});
  for (int i = 0; i < 4; ++i) recs.push_back({"XYZ", call - std::chrono::days(2 + 5 * i), Rating::kModerateBuy});
  const bool example = compute_mar(recs, "XYZ", call, MarWindow::kPrior1m) == Rating::kHold;

  Rng rng(11);
  int inert = 0;
  constexpr int kCases = 500;
  for (int t = 0; t < kCases; ++t) {
    const Date c = parse_date("2016-01-01") + std::chrono::days(rng.index(1000));
    const Date lo = add_months(c, -1);
    const long span = days_between(lo, c);
    std::vector<RecommendationRecord> base;
    const std::size_t n = rng.index(8);
    for (std::size_t i = 0; i < n; ++i)
      base.push_back({"XYZ", lo + std::chrono::days(1 + rng.index(span - 1)), kAllRatings[rng.index(5)]});
    auto noisy = base;
    for (int i = 0; i < 10; ++i) {
      const auto rating = kAllRatings[rng.index(5)];
      switch (rng.index(3)) {
        case 0: noisy.push_back({"XYZ", lo - std::chrono::days(rng.index(400)), rating}); break;
        case 1: noisy.push_back({"XYZ", c + std::chrono::days(rng.index(400)), rating}); break;
        default: noisy.push_back({"OTHER", lo + std::chrono::days(1 + rng.index(span - 1)), rating});
      }
    }
    std::vector<std::size_t> order(noisy.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<RecommendationRecord> shuffled;
    for (std::size_t i : order) shuffled.push_back(noisy[i]);
    inert += compute_mar(base, "XYZ", c, MarWindow::kPrior1m) ==
             compute_mar(shuffled, "XYZ", c, MarWindow::kPrior1m);
  }
  return {example && inert == kCases, std::string("worked example ") + (example ? "hold" : "wrong") + ", inert " +
                                          std::to_string(inert) + "/" + std::to_string(kCases)};
}

}  // namespace
}  // namespace ecpipe

int main() {
  using namespace ecpipe;
  const std::vector<Criterion> criteria = {
      {1, "label oracles", 5, label_oracles},
      {2, "gated GNN correctness", 5, gnn_correctness},
      {3, "gradient checks", 30, gradient_checks},
      {4, "permutation invariance", 30, permutation_invariance},
      {5, "end-to-end memorization", 300, end_to_end},
      {6, "constant classifier recall", 30, constant_classifier},
      {7, "econometrics", 120, econometrics},
      {8, "metric oracle", 30, metric_oracle},
      {9, "determinism", 300, determinism},
      {10, "config defaults", 5, config_defaults},
      {11, "majority analyst recommendation", 30, mar},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::printf("%s %2d %-32s %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", c.number, c.name.c_str(),
                out.detail.c_str(), secs, in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
