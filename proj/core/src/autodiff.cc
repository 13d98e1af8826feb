#include "ecpipe/autodiff.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecpipe/error.h"
#include "ecpipe/textgraph.h"

namespace ecpipe::autodiff {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                    "x" + std::to_string(b.cols()));
  }
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Var Tape::push(Matrix value, std::function<void(Tape&, std::size_t)> backward) {
  Node node;
  node.grad = Matrix(value.rows(), value.cols());
  node.value = std::move(value);
  node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return {nodes_.size() - 1};
}

Var Tape::constant(Matrix value) { return push(std::move(value), nullptr); }

Var Tape::parameter(const Matrix& value, Matrix* grad) {
  if (grad != nullptr) require_same_shape(value, *grad, "parameter");
  Var v = push(value, nullptr);
  nodes_[v.id].external_grad = grad;
  return v;
}

Var Tape::matmul(Var a, Var b) {
  return push(ecpipe::matmul(value(a), value(b)), [a, b](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    t.grad_of(a.id) += matmul_nt(g, t.value_of(b.id));
    t.grad_of(b.id) += matmul_tn(t.value_of(a.id), g);
  });
}

Var Tape::adjacency_matmul(const Adjacency& adjacency, Var x) {
  const Adjacency* adj = &adjacency;
  // The adjacency is symmetric, so its transpose is itself.
  return push(adjacency.multiply(value(x)), [adj, x](Tape& t, std::size_t self) {
    t.grad_of(x.id) += adj->multiply(t.grad_of(self));
  });
}

Var Tape::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  Matrix out = value(a);
  out += value(b);
  return push(std::move(out), [a, b](Tape& t, std::size_t self) {
    t.grad_of(a.id) += t.grad_of(self);
    t.grad_of(b.id) += t.grad_of(self);
  });
}

Var Tape::add_row(Var x, Var bias) {
  const Matrix& xv = value(x);
  const Matrix& bv = value(bias);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) {
    require_same_shape(Matrix(1, xv.cols()), bv, "add_row");
  }
  Matrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bv(0, c);
  }
  return push(std::move(out), [x, bias](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    t.grad_of(x.id) += g;
    Matrix& gb = t.grad_of(bias.id);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
  });
}

Var Tape::mul(Var a, Var b) {
  require_same_shape(value(a), value(b), "mul");
  Matrix out = value(a);
  auto ov = out.values();
  auto bv = value(b).values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] *= bv[i];
  return push(std::move(out), [a, b](Tape& t, std::size_t self) {
    auto g = t.grad_of(self).values();
    auto av = t.value_of(a.id).values();
    auto bv = t.value_of(b.id).values();
    auto ga = t.grad_of(a.id).values();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    auto gb = t.grad_of(b.id).values();
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
  });
}

Var Tape::one_minus(Var a) {
  Matrix out = value(a);
  for (double& v : out.values()) v = 1.0 - v;
  return push(std::move(out), [a](Tape& t, std::size_t self) {
    t.grad_of(a.id) -= t.grad_of(self);
  });
}

Var Tape::scale(Var a, double s) {
  Matrix out = value(a);
  out *= s;
  return push(std::move(out), [a, s](Tape& t, std::size_t self) {
    auto g = t.grad_of(self).values();
    auto ga = t.grad_of(a.id).values();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
  });
}

Var Tape::sigmoid(Var a) {
  Matrix out = value(a);
  for (double& v : out.values()) v = autodiff::sigmoid(v);
  return push(std::move(out), [a](Tape& t, std::size_t self) {
    auto g = t.grad_of(self).values();
    auto y = t.value_of(self).values();
    auto ga = t.grad_of(a.id).values();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var Tape::tanh(Var a) {
  Matrix out = value(a);
  for (double& v : out.values()) v = std::tanh(v);
  return push(std::move(out), [a](Tape& t, std::size_t self) {
    auto g = t.grad_of(self).values();
    auto y = t.value_of(self).values();
    auto ga = t.grad_of(a.id).values();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var Tape::relu(Var a) {
  Matrix out = value(a);
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return push(std::move(out), [a](Tape& t, std::size_t self) {
    auto g = t.grad_of(self).values();
    auto x = t.value_of(a.id).values();
    auto ga = t.grad_of(a.id).values();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (x[i] > 0.0) ga[i] += g[i];
  });
}

Var Tape::mean_rows(Var a) {
  const Matrix& av = value(a);
  if (av.rows() == 0) throw Error(ErrorCode::kEmptyGraph, "mean over zero rows");
  Matrix out(1, av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out(0, c) += av(r, c);
  out *= 1.0 / static_cast<double>(av.rows());
  return push(std::move(out), [a](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    Matrix& ga = t.grad_of(a.id);
    const double inv = 1.0 / static_cast<double>(ga.rows());
    for (std::size_t r = 0; r < ga.rows(); ++r)
      for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += g(0, c) * inv;
  });
}

Var Tape::concat_cols(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  if (av.rows() != bv.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "concat_cols: row counts differ");
  }
  Matrix out(av.rows(), av.cols() + bv.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    std::copy(av.row(r).begin(), av.row(r).end(), out.row(r).begin());
    std::copy(bv.row(r).begin(), bv.row(r).end(), out.row(r).begin() + av.cols());
  }
  return push(std::move(out), [a, b](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    Matrix& ga = t.grad_of(a.id);
    Matrix& gb = t.grad_of(b.id);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += g(r, c);
      for (std::size_t c = 0; c < gb.cols(); ++c) gb(r, c) += g(r, ga.cols() + c);
    }
  });
}

Var Tape::softmax_cross_entropy(Var logits, const std::vector<int>& labels) {
  const Matrix& z = value(logits);
  if (labels.size() != z.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "softmax_cross_entropy: label count");
  }
  Matrix probs(z.rows(), z.cols());
  double loss = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const auto row = z.row(r);
    const double m = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) sum += std::exp(row[c] - m);
    const double lse = m + std::log(sum);
    for (std::size_t c = 0; c < row.size(); ++c) probs(r, c) = std::exp(row[c] - lse);
    const auto label = static_cast<std::size_t>(labels[r]);
    if (label >= row.size()) {
      throw Error(ErrorCode::kShapeMismatch, "label out of range for logits");
    }
    loss += lse - row[label];
  }
  const double n = static_cast<double>(z.rows());
  Matrix out(1, 1, loss / n);
  return push(std::move(out), [logits, labels, probs = std::move(probs), n](
                                  Tape& t, std::size_t self) {
    const double g = t.grad_of(self)(0, 0);
    Matrix& gz = t.grad_of(logits.id);
    for (std::size_t r = 0; r < probs.rows(); ++r)
      for (std::size_t c = 0; c < probs.cols(); ++c) {
        const double target = static_cast<std::size_t>(labels[r]) == c ? 1.0 : 0.0;
        gz(r, c) += g * (probs(r, c) - target) / n;
      }
  });
}

Var Tape::sigmoid_cross_entropy(Var logits, const std::vector<int>& labels) {
  const Matrix& z = value(logits);
  if (z.cols() != 1 || labels.size() != z.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "sigmoid_cross_entropy expects n x 1 logits");
  }
  double loss = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const double x = z(r, 0);
    // log(1 + exp(-|x|)) + max(x, 0) - x*y
    loss += std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0) - x * labels[r];
  }
  const double n = static_cast<double>(z.rows());
  return push(Matrix(1, 1, loss / n), [logits, labels, n](Tape& t, std::size_t self) {
    const double g = t.grad_of(self)(0, 0);
    const Matrix& zv = t.value_of(logits.id);
    Matrix& gz = t.grad_of(logits.id);
    for (std::size_t r = 0; r < zv.rows(); ++r)
      gz(r, 0) += g * (autodiff::sigmoid(zv(r, 0)) - labels[r]) / n;
  });
}

void Tape::backward(Var out, double seed) {
  if (nodes_[out.id].value.size() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "backward needs a scalar output");
  }
  nodes_[out.id].grad(0, 0) += seed;
  for (std::size_t i = out.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (node.backward) node.backward(*this, i);
    if (node.external_grad != nullptr) *node.external_grad += node.grad;
  }
}

}  // namespace ecpipe::autodiff
