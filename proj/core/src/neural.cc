#include "ecpipe/neural.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <atomic>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "ecpipe/csv.h"
#include "ecpipe/error.h"

namespace ecpipe {

using autodiff::Tape;
using autodiff::Var;

Matrix xavier_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (double& v : m.values()) v = rng.uniform(-limit, limit);
  return m;
}

GatedGnnParams GatedGnnParams::zeros(std::size_t dim) {
  GatedGnnParams p;
  for (Matrix* m : {&p.w_a, &p.w_x, &p.w_r, &p.w_z, &p.u_x, &p.u_r, &p.u_z})
    *m = Matrix(dim, dim);
  for (Matrix* b : {&p.b_x, &p.b_r, &p.b_z}) *b = Matrix(1, dim);
  return p;
}

GatedGnnParams GatedGnnParams::initialized(std::size_t dim, Rng& rng) {
  GatedGnnParams p = zeros(dim);
  for (Matrix* m : {&p.w_a, &p.w_x, &p.w_r, &p.w_z, &p.u_x, &p.u_r, &p.u_z})
    *m = xavier_uniform(dim, dim, rng);
  return p;
}

void GatedGnnParams::for_each(const ParamVisitor& f) {
  f("gnn.w_a", w_a);
  f("gnn.w_x", w_x);
  f("gnn.w_r", w_r);
  f("gnn.w_z", w_z);
  f("gnn.u_x", u_x);
  f("gnn.u_r", u_r);
  f("gnn.u_z", u_z);
  f("gnn.b_x", b_x);
  f("gnn.b_r", b_r);
  f("gnn.b_z", b_z);
}

void GatedGnnParams::for_each(const ConstParamVisitor& f) const {
  const_cast<GatedGnnParams*>(this)->for_each(
      [&f](std::string_view name, Matrix& m) { f(name, m); });
}

Mlp Mlp::zeros(std::size_t in, std::size_t hidden, std::size_t out,
               Activation act) {
  if (in == 0 || hidden == 0 || out == 0) {
    throw Error(ErrorCode::kShapeMismatch, "MLP dimensions must be positive");
  }
  return Mlp{Matrix(in, hidden), Matrix(1, hidden), Matrix(hidden, out),
             Matrix(1, out), act};
}

Mlp Mlp::initialized(std::size_t in, std::size_t hidden, std::size_t out,
                     Rng& rng, Activation act) {
  Mlp m = zeros(in, hidden, out, act);
  m.w1 = xavier_uniform(in, hidden, rng);
  m.w2 = xavier_uniform(hidden, out, rng);
  return m;
}

void Mlp::for_each(std::string_view prefix, const ParamVisitor& f) {
  const std::string p(prefix);
  f(p + ".w1", w1);
  f(p + ".b1", b1);
  f(p + ".w2", w2);
  f(p + ".b2", b2);
}

void Mlp::for_each(std::string_view prefix, const ConstParamVisitor& f) const {
  const_cast<Mlp*>(this)->for_each(
      prefix, [&f](std::string_view name, Matrix& m) { f(name, m); });
}

Var Mlp::record(Tape& tape, Var x, Mlp* grad) const {
  const Var w1v = tape.parameter(w1, grad ? &grad->w1 : nullptr);
  const Var b1v = tape.parameter(b1, grad ? &grad->b1 : nullptr);
  const Var w2v = tape.parameter(w2, grad ? &grad->w2 : nullptr);
  const Var b2v = tape.parameter(b2, grad ? &grad->b2 : nullptr);
  Var h = tape.add_row(tape.matmul(x, w1v), b1v);
  h = hidden == Activation::kTanh ? tape.tanh(h) : tape.relu(h);
  return tape.add_row(tape.matmul(h, w2v), b2v);
}

Matrix Mlp::forward(const Matrix& x) const {
  Tape tape;
  return tape.value(record(tape, tape.constant(x)));
}

AggregatorParams AggregatorParams::initialized(std::size_t dim,
                                               std::size_t out, Rng& rng) {
  AggregatorParams p;
  p.gate = Mlp::initialized(dim, dim, out, rng);
  p.value = Mlp::initialized(dim, dim, out, rng);
  return p;
}

void StockGnnModel::for_each(const ParamVisitor& f) {
  gnn.for_each(f);
  aggregator.gate.for_each("aggregator.gate", f);
  aggregator.value.for_each("aggregator.value", f);
  head.for_each("head", f);
}

void StockGnnModel::for_each(const ConstParamVisitor& f) const {
  const_cast<StockGnnModel*>(this)->for_each(
      [&f](std::string_view name, Matrix& m) { f(name, m); });
}

StockGnnModel StockGnnModel::zeros_like() const {
  StockGnnModel z = *this;
  z.for_each([](std::string_view, Matrix& m) { m.fill(0.0); });
  return z;
}

std::size_t StockGnnModel::parameter_count() const {
  std::size_t n = 0;
  for_each([&n](std::string_view, const Matrix& m) { n += m.size(); });
  return n;
}

StockGnnModel init_stock_gnn(const StockGnnShape& shape, std::uint64_t seed) {
  if (shape.feature_dim == 0 || shape.graph_embedding_dim == 0 ||
      shape.head_hidden == 0 || shape.steps < 1) {
    throw Error(ErrorCode::kInvalidConfig, "StockGNN dimensions and steps must be positive");
  }
  Rng rng(seed);
  StockGnnModel m;
  m.gnn = GatedGnnParams::initialized(shape.feature_dim, rng);
  m.aggregator = AggregatorParams::initialized(shape.feature_dim,
                                               shape.graph_embedding_dim, rng);
  m.head = Mlp::initialized(shape.graph_embedding_dim + shape.doc_dim,
                            shape.head_hidden, 2, rng);
  m.steps = shape.steps;
  return m;
}

namespace {

struct GnnVars {
  Var w_a, w_x, w_r, w_z, u_x, u_r, u_z, b_x, b_r, b_z;
};

GnnVars bind(Tape& tape, const GatedGnnParams& p, GatedGnnParams* g) {
  auto bind_one = [&](const Matrix& v, Matrix* gv) { return tape.parameter(v, gv); };
  return {bind_one(p.w_a, g ? &g->w_a : nullptr), bind_one(p.w_x, g ? &g->w_x : nullptr),
          bind_one(p.w_r, g ? &g->w_r : nullptr), bind_one(p.w_z, g ? &g->w_z : nullptr),
          bind_one(p.u_x, g ? &g->u_x : nullptr), bind_one(p.u_r, g ? &g->u_r : nullptr),
          bind_one(p.u_z, g ? &g->u_z : nullptr), bind_one(p.b_x, g ? &g->b_x : nullptr),
          bind_one(p.b_r, g ? &g->b_r : nullptr), bind_one(p.b_z, g ? &g->b_z : nullptr)};
}

Var record_step(Tape& t, Var z, const Adjacency& adjacency, const GnnVars& p) {
  const Var a = t.matmul(t.adjacency_matmul(adjacency, z), p.w_a);
  const Var x = t.sigmoid(t.add_row(t.add(t.matmul(a, p.w_x), t.matmul(z, p.u_x)), p.b_x));
  const Var r = t.sigmoid(t.add_row(t.add(t.matmul(a, p.w_r), t.matmul(z, p.u_r)), p.b_r));
  const Var h = t.tanh(t.add_row(
      t.add(t.matmul(a, p.w_z), t.matmul(t.mul(r, z), p.u_z)), p.b_z));
  return t.add(h, t.mul(z, t.one_minus(x)));
}

void check_gnn_shapes(const Matrix& z, const Adjacency& adjacency,
                      const GatedGnnParams& p) {
  if (z.cols() != p.dim() || z.rows() != adjacency.num_nodes()) {
    throw Error(ErrorCode::kShapeMismatch,
                "node states " + std::to_string(z.rows()) + "x" +
                    std::to_string(z.cols()) + " vs " +
                    std::to_string(adjacency.num_nodes()) + " nodes of dim " +
                    std::to_string(p.dim()));
  }
}

Var record_aggregate(Tape& t, Var z, const AggregatorParams& p,
                     AggregatorParams* g) {
  if (t.value(z).rows() == 0) throw Error(ErrorCode::kEmptyGraph, "graph has no nodes");
  const Var gate = t.sigmoid(p.gate.record(t, z, g ? &g->gate : nullptr));
  const Var value = t.tanh(p.value.record(t, z, g ? &g->value : nullptr));
  return t.mean_rows(t.mul(gate, value));
}

Var record_logits(Tape& t, const StockGnnModel& model, const TextGraph& graph,
                  std::span<const double> doc_embedding, StockGnnModel* grad) {
  if (doc_embedding.size() != model.doc_dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "document embedding has " + std::to_string(doc_embedding.size()) +
                    " entries, model expects " + std::to_string(model.doc_dim()));
  }
  if (graph.num_nodes() == 0) throw Error(ErrorCode::kEmptyGraph, "graph has no nodes");
  check_gnn_shapes(graph.node_features, graph.adjacency, model.gnn);
  const GnnVars p = bind(t, model.gnn, grad ? &grad->gnn : nullptr);
  Var z = t.constant(graph.node_features);
  for (int k = 0; k < model.steps; ++k) z = record_step(t, z, graph.adjacency, p);
  Var embedding = record_aggregate(t, z, model.aggregator,
                                   grad ? &grad->aggregator : nullptr);
  if (!doc_embedding.empty()) {
    embedding = t.concat_cols(embedding, t.constant(Matrix::row_vector(doc_embedding)));
  }
  return model.head.record(t, embedding, grad ? &grad->head : nullptr);
}

}  // namespace

Matrix gated_gnn_step(const Matrix& z_prev, const Adjacency& adjacency,
                      const GatedGnnParams& params) {
  check_gnn_shapes(z_prev, adjacency, params);
  Tape t;
  const GnnVars p = bind(t, params, nullptr);
  return t.value(record_step(t, t.constant(z_prev), adjacency, p));
}

Matrix run_gnn(const TextGraph& graph, const GatedGnnParams& params, int steps) {
  if (steps < 1) throw Error(ErrorCode::kInvalidConfig, "GNN steps must be >= 1");
  Matrix z = graph.node_features;
  for (int k = 0; k < steps; ++k) z = gated_gnn_step(z, graph.adjacency, params);
  return z;
}

std::vector<double> aggregate(const Matrix& z_final, const AggregatorParams& params) {
  if (z_final.rows() == 0) throw Error(ErrorCode::kEmptyGraph, "graph has no nodes");
  if (z_final.cols() != params.gate.in_dim()) {
    throw Error(ErrorCode::kShapeMismatch, "aggregator input dimension mismatch");
  }
  Tape t;
  const Matrix& out = t.value(record_aggregate(t, t.constant(z_final), params, nullptr));
  return {out.values().begin(), out.values().end()};
}

std::array<double, 2> forward_classify(const TextGraph& graph,
                                       const StockGnnModel& model,
                                       std::span<const double> doc_embedding) {
  Tape t;
  const Matrix& logits = t.value(record_logits(t, model, graph, doc_embedding, nullptr));
  const double m = std::max(logits(0, 0), logits(0, 1));
  const double e0 = std::exp(logits(0, 0) - m);
  const double e1 = std::exp(logits(0, 1) - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double example_loss(const StockGnnModel& model, const GraphExample& example,
                    StockGnnModel* grad, double seed) {
  if (example.label != 0 && example.label != 1) {
    throw Error(ErrorCode::kSchemaViolation, "label must be 0 or 1");
  }
  Tape t;
  const Var logits = record_logits(t, model, example.graph, example.doc_embedding, grad);
  const Var loss = t.softmax_cross_entropy(logits, {example.label});
  const double value = t.value(loss)(0, 0);
  if (grad != nullptr) t.backward(loss, seed);
  return value;
}

double mean_loss(const StockGnnModel& model, std::span<const GraphExample> examples) {
  if (examples.empty()) throw Error(ErrorCode::kEmptyInput, "no examples");
  double total = 0.0;
  for (const auto& e : examples) total += example_loss(model, e);
  return total / static_cast<double>(examples.size());
}

namespace {

constexpr std::size_t kGradientChunk = 16;

void add_scaled(StockGnnModel& model, const StockGnnModel& delta, double s) {
  std::vector<const Matrix*> src;
  delta.for_each([&src](std::string_view, const Matrix& m) { src.push_back(&m); });
  std::size_t i = 0;
  model.for_each([&](std::string_view, Matrix& m) {
    auto dst = m.values();
    auto from = src[i++]->values();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += s * from[j];
  });
}

// Gradient of the mean loss over `batch` (indices into `examples`). Work is
// cut into fixed-size chunks whose partial sums are combined in order, so the
// result is identical for any thread count.
double batch_gradient(const StockGnnModel& model,
                      std::span<const GraphExample> examples,
                      std::span<const std::size_t> batch, unsigned threads,
                      StockGnnModel& grad) {
  const std::size_t chunks = (batch.size() + kGradientChunk - 1) / kGradientChunk;
  const double seed = 1.0 / static_cast<double>(batch.size());
  std::vector<StockGnnModel> partial(chunks, grad);
  std::vector<double> losses(chunks, 0.0);
  auto work = [&](std::size_t c) {
    const std::size_t end = std::min(batch.size(), (c + 1) * kGradientChunk);
    for (std::size_t i = c * kGradientChunk; i < end; ++i)
      losses[c] += example_loss(model, examples[batch[i]], &partial[c], seed);
  };
  if (threads <= 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) work(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(threads, chunks); ++w) {
      pool.emplace_back([&] {
        for (std::size_t c; (c = next.fetch_add(1)) < chunks;) {
          try {
            work(c);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }
  double loss = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    add_scaled(grad, partial[c], 1.0);
    loss += losses[c];
  }
  return loss / static_cast<double>(batch.size());
}

}  // namespace

GnnTrainResult train_stock_gnn(std::span<const GraphExample> train,
                               std::span<const GraphExample> validation,
                               const GnnTrainConfig& config) {
  if (train.empty()) throw Error(ErrorCode::kEmptyInput, "empty training set");
  if (config.batch_size == 0 || config.epochs < 0 || !(config.learning_rate >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "bad StockGNN training config");
  }
  StockGnnShape shape = config.shape;
  shape.doc_dim = train.front().doc_embedding.size();
  if (!train.front().graph.node_features.empty()) {
    shape.feature_dim = train.front().graph.node_features.cols();
  }
  GnnTrainResult result;
  result.model = init_stock_gnn(shape, mix_seed(config.seed, 1));
  Rng order_rng(mix_seed(config.seed, 2));

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  double best_validation = std::numeric_limits<double>::infinity();
  StockGnnModel best = result.model;
  int since_best = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::span<const std::size_t> batch(order.data() + start, end - start);
      StockGnnModel grad = result.model.zeros_like();
      const double loss = batch_gradient(result.model, train, batch, config.threads, grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "epoch " + std::to_string(epoch) + " batch " +
                        std::to_string(batches) + ": loss " + format_number(loss) +
                        " (lr " + format_number(config.learning_rate) + ")");
      }
      add_scaled(result.model, grad, -config.learning_rate);
      epoch_loss += loss;
      ++batches;
    }
    result.train_loss.push_back(epoch_loss / static_cast<double>(batches));
    if (!validation.empty()) {
      const double v = mean_loss(result.model, validation);
      result.validation_loss.push_back(v);
      if (v < best_validation) {
        best_validation = v;
        best = result.model;
        result.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= config.patience) {
        break;
      }
    } else {
      result.best_epoch = epoch;
    }
  }
  if (!validation.empty() && !result.validation_loss.empty()) result.model = std::move(best);
  return result;
}

namespace {

nlohmann::ordered_json config_to_json(const GnnTrainConfig& c) {
  nlohmann::ordered_json j;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["patience"] = c.patience;
  j["seed"] = c.seed;
  j["feature_dim"] = c.shape.feature_dim;
  j["graph_embedding_dim"] = c.shape.graph_embedding_dim;
  j["doc_dim"] = c.shape.doc_dim;
  j["head_hidden"] = c.shape.head_hidden;
  j["steps"] = c.shape.steps;
  return j;
}

GnnTrainConfig config_from_json(const nlohmann::json& j) {
  GnnTrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.patience = j.at("patience").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.shape.feature_dim = j.at("feature_dim").get<std::size_t>();
  c.shape.graph_embedding_dim = j.at("graph_embedding_dim").get<std::size_t>();
  c.shape.doc_dim = j.at("doc_dim").get<std::size_t>();
  c.shape.head_hidden = j.at("head_hidden").get<std::size_t>();
  c.shape.steps = j.at("steps").get<int>();
  return c;
}

}  // namespace

std::string checkpoint_to_string(const StockGnnModel& model,
                                 const GnnTrainConfig& config) {
  nlohmann::ordered_json j;
  j["format"] = "ecpipe.stockgnn";
  j["version"] = 1;
  j["seed"] = config.seed;
  GnnTrainConfig recorded = config;
  recorded.shape.feature_dim = model.feature_dim();
  recorded.shape.graph_embedding_dim = model.aggregator.out_dim();
  recorded.shape.doc_dim = model.doc_dim();
  recorded.shape.head_hidden = model.head.hidden_dim();
  recorded.shape.steps = model.steps;
  j["config"] = config_to_json(recorded);
  j["steps"] = model.steps;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  model.for_each([&params](std::string_view name, const Matrix& m) {
    nlohmann::ordered_json p;
    p["rows"] = m.rows();
    p["cols"] = m.cols();
    p["data"] = m.storage();
    params[std::string(name)] = std::move(p);
  });
  j["parameters"] = std::move(params);
  return j.dump(1) + "\n";
}

StockGnnModel checkpoint_from_string(std::string_view text, GnnTrainConfig* config) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("checkpoint: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "ecpipe.stockgnn") {
      throw Error(ErrorCode::kSchemaViolation, "not a StockGNN checkpoint");
    }
    if (j.at("version").get<int>() != 1) {
      throw Error(ErrorCode::kSchemaViolation, "unsupported checkpoint version");
    }
    const GnnTrainConfig c = config_from_json(j.at("config"));
    StockGnnModel model = init_stock_gnn(c.shape, 0);
    const auto& params = j.at("parameters");
    model.for_each([&params](std::string_view name, Matrix& m) {
      const auto& p = params.at(std::string(name));
      Matrix loaded(p.at("rows").get<std::size_t>(), p.at("cols").get<std::size_t>(),
                    p.at("data").get<std::vector<double>>());
      if (!loaded.same_shape(m)) {
        throw Error(ErrorCode::kShapeMismatch, "checkpoint parameter " + std::string(name));
      }
      m = std::move(loaded);
    });
    if (config) *config = c;
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const StockGnnModel& model,
                     const GnnTrainConfig& config) {
  write_file(path, checkpoint_to_string(model, config));
}

StockGnnModel load_checkpoint(const std::string& path, GnnTrainConfig* config) {
  return checkpoint_from_string(read_file(path), config);
}

}  // namespace ecpipe
