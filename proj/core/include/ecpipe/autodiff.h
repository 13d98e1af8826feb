#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ecpipe/matrix.h"

namespace ecpipe {

class Adjacency;

namespace autodiff {

// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

// Reverse-mode differentiation over dense matrices. Every op appends a node
// holding its forward value and a closure that pushes the node's gradient to
// its inputs; backward() replays the closures in reverse order. A tape is
// used for one forward/backward pass and then discarded.
class Tape {
 public:
  Var constant(Matrix value);
  // Leaf whose gradient is added into `*grad` (same shape) by backward().
  Var parameter(const Matrix& value, Matrix* grad);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  const Matrix& grad(Var v) const { return nodes_[v.id].grad; }
  std::size_t size() const { return nodes_.size(); }

  Var matmul(Var a, Var b);
  // adjacency * x. `adjacency` must outlive the tape.
  Var adjacency_matmul(const Adjacency& adjacency, Var x);
  Var add(Var a, Var b);
  // x + bias broadcast over rows; bias is 1 x cols(x).
  Var add_row(Var x, Var bias);
  Var mul(Var a, Var b);
  Var one_minus(Var a);
  Var scale(Var a, double s);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  // n x d -> 1 x d.
  Var mean_rows(Var a);
  // 1 x m, 1 x n -> 1 x (m + n).
  Var concat_cols(Var a, Var b);
  // Mean over rows of -log softmax(logits)[label]; labels.size() == rows.
  Var softmax_cross_entropy(Var logits, const std::vector<int>& labels);
  // Mean binary cross-entropy of sigmoid(logits), logits is n x 1.
  Var sigmoid_cross_entropy(Var logits, const std::vector<int>& labels);

  // Seeds d(out)/d(out) = seed (out must be 1 x 1) and propagates.
  void backward(Var out, double seed = 1.0);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void(Tape&, std::size_t)> backward;
    Matrix* external_grad = nullptr;
  };

  Var push(Matrix value, std::function<void(Tape&, std::size_t)> backward);
  Matrix& grad_of(std::size_t id) { return nodes_[id].grad; }
  const Matrix& value_of(std::size_t id) const { return nodes_[id].value; }

  std::vector<Node> nodes_;
};

double sigmoid(double x);

}  // namespace autodiff
}  // namespace ecpipe
