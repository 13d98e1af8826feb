#include "ecpipe/classifiers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ecpipe/autodiff.h"
#include "ecpipe/csv.h"
#include "ecpipe/error.h"
#include "ecpipe/rng.h"

namespace ecpipe {

std::string_view feature_source_name(FeatureSource source) {
  switch (source) {
    case FeatureSource::kEmbedding: return "embedding";
    case FeatureSource::kSentiment: return "sentiment";
    case FeatureSource::kSalesEps: return "sales_eps";
    case FeatureSource::kCombined: return "combined";
  }
  return "unknown";
}

void FeatureMatrix::validate() const {
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyInput, "feature matrix has no rows");
  if (labels.size() != x.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "labels do not align with feature rows");
  }
  if (!x.all_finite()) throw Error(ErrorCode::kSchemaViolation, "non-finite feature value");
  for (int y : labels)
    if (y != 0 && y != 1) throw Error(ErrorCode::kSchemaViolation, "label outside {0,1}");
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const std::size_t n = x.rows(), p = x.cols();
  s.mean.assign(p, 0.0);
  s.scale.assign(p, 1.0);
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) s.mean[j] += x(i, j);
  for (double& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      const double d = x(i, j) - s.mean[j];
      var[j] += d * d;
    }
  for (std::size_t j = 0; j < p; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    s.scale[j] = sd > 1e-12 * std::max(1.0, std::abs(s.mean[j])) ? sd : 1.0;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t cols) {
  return Standardizer{std::vector<double>(cols, 0.0), std::vector<double>(cols, 1.0)};
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "expected " + std::to_string(mean.size()) + " features, got " +
                    std::to_string(x.cols()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - mean[j]) / scale[j];
  return out;
}

std::string_view head_kind_name(HeadKind kind) {
  switch (kind) {
    case HeadKind::kLogReg: return "logreg";
    case HeadKind::kLinearSvm: return "svm";
    case HeadKind::kMlp: return "mlp";
  }
  return "unknown";
}

HeadKind parse_head_kind(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "logreg" || t == "logistic") return HeadKind::kLogReg;
  if (t == "svm" || t == "linear-svm" || t == "linear_svm") return HeadKind::kLinearSvm;
  if (t == "mlp") return HeadKind::kMlp;
  throw Error(ErrorCode::kInvalidConfig, "unknown classifier '" + std::string(text) + "'");
}

std::size_t default_mlp_hidden(std::size_t input_dim, FeatureSource source) {
  if (source == FeatureSource::kSalesEps) return 16;
  if (input_dim <= 100) return 32;
  if (input_dim <= 200) return 64;
  return 128;
}

std::vector<double> TrainedHead::raw_coefficients() const {
  std::vector<double> out(weights.size() + 1);
  out[0] = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    out[j + 1] = weights[j] / standardizer.scale[j];
    out[0] -= weights[j] * standardizer.mean[j] / standardizer.scale[j];
  }
  return out;
}

namespace {

void fit_logreg(const Matrix& x, const std::vector<int>& y, const HeadConfig& c,
                TrainedHead& head) {
  const std::size_t n = x.rows(), p = x.cols();
  head.weights.assign(p, 0.0);
  head.bias = 0.0;
  std::vector<double> gw(p);
  for (int it = 0; it < c.max_iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = autodiff::sigmoid(dot(x.row(i), head.weights) + head.bias) - y[i];
      auto row = x.row(i);
      for (std::size_t j = 0; j < p; ++j) gw[j] += r * row[j];
      gb += r;
    }
    double gmax = std::abs(gb) / n;
    for (std::size_t j = 0; j < p; ++j) {
      gw[j] = gw[j] / n + c.l2 * head.weights[j];
      gmax = std::max(gmax, std::abs(gw[j]));
    }
    if (gmax < c.tolerance) break;
    for (std::size_t j = 0; j < p; ++j) head.weights[j] -= c.learning_rate * gw[j];
    head.bias -= c.learning_rate * gb / n;
  }
}

// Full-batch subgradient descent on mean hinge loss + (l2/2)|w|^2 with a
// 1/sqrt(t) step; the iterate with the lowest objective is kept.
void fit_svm(const Matrix& x, const std::vector<int>& y, const HeadConfig& c,
             TrainedHead& head) {
  const std::size_t n = x.rows(), p = x.cols();
  const double lambda = c.l2 > 0.0 ? c.l2 : 1e-3;
  std::vector<double> w(p, 0.0), gw(p);
  double b = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < c.max_iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0, hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = y[i] == 1 ? 1.0 : -1.0;
      const double margin = s * (dot(x.row(i), w) + b);
      if (margin < 1.0) {
        hinge += 1.0 - margin;
        auto row = x.row(i);
        for (std::size_t j = 0; j < p; ++j) gw[j] -= s * row[j];
        gb -= s;
      }
    }
    const double objective = hinge / n + 0.5 * lambda * dot(w, w);
    if (objective < best) {
      best = objective;
      head.weights = w;
      head.bias = b;
    }
    const double step = c.learning_rate / std::sqrt(1.0 + it);
    for (std::size_t j = 0; j < p; ++j) w[j] -= step * (gw[j] / n + lambda * w[j]);
    b -= step * gb / n;
  }
}

void fit_mlp(const Matrix& x, const std::vector<int>& y, const HeadConfig& c,
             TrainedHead& head) {
  const std::size_t n = x.rows(), p = x.cols();
  const std::size_t hidden = c.hidden > 0 ? c.hidden : default_mlp_hidden(p, head.source);
  const std::size_t out = c.output == MlpOutput::kSigmoid ? 1 : 2;
  Rng rng(mix_seed(c.seed, 21));
  head.mlp = Mlp::initialized(p, hidden, out, rng, Activation::kRelu);
  head.output = c.output;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, c.batch_size);
  for (int epoch = 0; epoch < c.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      Matrix xb(stop - start, p);
      std::vector<int> yb;
      for (std::size_t k = start; k < stop; ++k) {
        auto src = x.row(order[k]);
        std::copy(src.begin(), src.end(), xb.row(k - start).begin());
        yb.push_back(y[order[k]]);
      }
      Mlp grad = Mlp::zeros(p, hidden, out, Activation::kRelu);
      autodiff::Tape tape;
      const auto logits = head.mlp.record(tape, tape.constant(std::move(xb)), &grad);
      const auto loss = c.output == MlpOutput::kSigmoid
                            ? tape.sigmoid_cross_entropy(logits, yb)
                            : tape.softmax_cross_entropy(logits, yb);
      const double value = tape.value(loss)(0, 0);
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "MLP head loss " + format_number(value) + " at epoch " +
                        std::to_string(epoch));
      }
      tape.backward(loss);
      grad.w1 *= c.mlp_learning_rate;
      grad.b1 *= c.mlp_learning_rate;
      grad.w2 *= c.mlp_learning_rate;
      grad.b2 *= c.mlp_learning_rate;
      head.mlp.w1 -= grad.w1;
      head.mlp.b1 -= grad.b1;
      head.mlp.w2 -= grad.w2;
      head.mlp.b2 -= grad.b2;
      if (c.l2 > 0.0) {
        const double shrink = 1.0 - c.mlp_learning_rate * c.l2;
        head.mlp.w1 *= shrink;
        head.mlp.w2 *= shrink;
      }
    }
  }
}

}  // namespace

TrainedHead fit_head(const FeatureMatrix& data, const HeadConfig& config) {
  data.validate();
  const auto ones = std::count(data.labels.begin(), data.labels.end(), 1);
  if (ones == 0 || ones == static_cast<long>(data.labels.size())) {
    throw Error(ErrorCode::kDegenerateLabels,
                "training labels contain a single class (" +
                    std::to_string(data.labels.size()) + " rows)");
  }
  if (!(config.learning_rate > 0.0) || config.max_iterations < 0 || config.epochs < 0 ||
      config.l2 < 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "bad classifier config");
  }
  TrainedHead head;
  head.kind = config.kind;
  head.source = data.source;
  head.standardizer = config.standardize ? Standardizer::fit(data.x)
                                         : Standardizer::identity(data.x.cols());
  const Matrix x = head.standardizer.apply(data.x);
  switch (config.kind) {
    case HeadKind::kLogReg: fit_logreg(x, data.labels, config, head); break;
    case HeadKind::kLinearSvm: fit_svm(x, data.labels, config, head); break;
    case HeadKind::kMlp: fit_mlp(x, data.labels, config, head); break;
  }
  return head;
}

Predictions predict(const TrainedHead& head, const Matrix& x) {
  const Matrix z = head.standardizer.apply(x);
  Predictions out;
  out.labels.reserve(z.rows());
  out.scores.reserve(z.rows());
  if (head.kind == HeadKind::kMlp) {
    const Matrix logits = head.mlp.forward(z);
    for (std::size_t i = 0; i < z.rows(); ++i) {
      const double prob = head.output == MlpOutput::kSigmoid
                              ? autodiff::sigmoid(logits(i, 0))
                              : autodiff::sigmoid(logits(i, 1) - logits(i, 0));
      out.scores.push_back(prob);
      out.labels.push_back(prob >= 0.5 ? 1 : 0);
    }
    return out;
  }
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const double margin = dot(z.row(i), head.weights) + head.bias;
    if (head.kind == HeadKind::kLogReg) {
      const double prob = autodiff::sigmoid(margin);
      out.scores.push_back(prob);
      out.labels.push_back(prob >= 0.5 ? 1 : 0);
    } else {
      out.scores.push_back(margin);
      out.labels.push_back(margin >= 0.0 ? 1 : 0);
    }
  }
  return out;
}

Evaluation evaluate(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction and truth lengths differ");
  }
  if (truth.empty()) throw Error(ErrorCode::kEmptyInput, "nothing to evaluate");
  std::map<int, std::size_t> tp, pred_count, true_count;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++pred_count[predicted[i]];
    ++true_count[truth[i]];
    pred_count.try_emplace(truth[i], 0);
    true_count.try_emplace(predicted[i], 0);
    if (predicted[i] == truth[i]) {
      ++correct;
      ++tp[truth[i]];
    }
  }
  Evaluation e;
  e.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (const auto& [label, npred] : pred_count) {
    ClassMetrics m;
    m.label = label;
    m.predicted = npred;
    m.support = true_count[label];
    const double hits = static_cast<double>(tp[label]);
    m.precision = npred > 0 ? hits / static_cast<double>(npred) : 0.0;
    m.recall = m.support > 0 ? hits / static_cast<double>(m.support) : 0.0;
    e.macro_precision += m.precision;
    e.macro_recall += m.recall;
    e.per_class.push_back(m);
  }
  e.macro_precision /= static_cast<double>(e.per_class.size());
  e.macro_recall /= static_cast<double>(e.per_class.size());
  return e;
}

}  // namespace ecpipe
