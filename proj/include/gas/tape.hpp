#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "gas/lstm.hpp"
#include "gas/tensor.hpp"

namespace gas {

// Handle into a Tape.
struct Var {
  std::uint32_t idx = 0;
};

// Reverse-mode tape over vector-valued nodes. Parameter leaves reference
// external tensors without copying; gradients accumulate into per-node
// buffers, read back by the caller after backward().
//
// A tape records one forward computation and is discarded (or reset)
// afterwards. Nodes without a gradient-requiring ancestor skip backward
// closures entirely, so constant inputs (embeddings) are cheap.
class Tape {
 public:
  // Trainable leaf; the tensor must outlive the tape.
  Var leaf(const Tensor* external);

  // Constant input; does not receive gradients.
  Var input(Tensor value);

  Var zeros(std::size_t len);

  Var add(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double s);
  Var mask(Var a, Tensor m);  // elementwise by a constant vector
  Var matvec(Var w, Var x);
  Var affine(Var w, Var x, Var b);  // W x + b
  Var concat(const std::vector<Var>& parts);
  Var slice(Var v, std::size_t offset, std::size_t len);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  // e[i] = dot(g[i], m)
  Var stack_dots(const std::vector<Var>& gs, Var m);
  // sum_i w[i] * g[i]
  Var weighted_sum(const std::vector<Var>& gs, Var w);
  Var softmax(Var v);
  // lambda * a + (1 - lambda) * b, lambda a length-1 var
  Var mix(Var a, Var b, Var lambda);
  // -log softmax(logits)[gold], stable
  Var cross_entropy_logits(Var logits, std::size_t gold);

  // LSTM building blocks on the tape. Leaves for one cell's parameters.
  struct CellVars {
    Var w_input, w_recurrent, bias;
    std::size_t input_dim = 0, hidden = 0;
  };
  CellVars cell_leaves(const LstmCellParams& cell);
  // Returns (h, c) after one step.
  std::pair<Var, Var> lstm_step(const CellVars& cell, Var x, Var h_prev, Var c_prev);
  // Final hidden state after consuming seq in order; zero vector for empty seq.
  Var run_lstm(const CellVars& cell, const std::vector<Var>& seq);

  void backward(Var root);

  const Tensor& value(Var v) const { return nodes_[v.idx].ref ? *nodes_[v.idx].ref : nodes_[v.idx].val; }
  const Tensor& grad(Var v) const { return nodes_[v.idx].grad; }
  bool requires_grad(Var v) const { return nodes_[v.idx].needs_grad; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    const Tensor* ref = nullptr;  // set for parameter leaves
    Tensor val;
    Tensor grad;
    bool needs_grad = false;
    std::function<void()> back;  // empty for leaves/constants
  };

  std::vector<Node> nodes_;

  Var push(Tensor value, bool needs_grad, std::function<void()> back);
  Tensor& grad_buf(Var v);
};

}  // namespace gas
