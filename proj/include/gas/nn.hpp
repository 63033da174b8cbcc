#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gas/rng.hpp"
#include "gas/tensor.hpp"

namespace gas {

// Max-subtraction softmax. Output is positive and sums to 1.
Tensor softmax(const Tensor& v);

// -log(p[gold]), with p clamped at 1e-12 before the log.
double cross_entropy(const Tensor& pred_dist, std::size_t gold_index);

// Stable -log softmax(logits)[gold] without forming the distribution.
double cross_entropy_logits(const Tensor& logits, std::size_t gold_index);

// Orthonormal rows (or columns when rows > cols), Gram-Schmidt over a
// seeded gaussian draw.
Tensor init_orthogonal(std::size_t rows, std::size_t cols, Rng& rng);

Tensor init_uniform(std::vector<std::size_t> shape, Rng& rng, double lo = -0.1, double hi = 0.1);

// Inverted dropout: 0 with probability `rate`, else 1/(1-rate). All ones
// when not training or rate == 0.
Tensor dropout_mask(std::size_t len, double rate, Rng& rng, bool training);

// One named tensor with its optimizer state. `tensor` points at externally
// owned storage (the model); m and v are owned here.
struct ParamGroup {
  std::string name;
  Tensor* tensor = nullptr;
  bool trainable = true;
  Tensor adam_m;
  Tensor adam_v;
};

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard Adam with bias correction at step t (t >= 1). Frozen groups are
// left untouched. grads[i] matches groups[i] in shape.
void adam_step(std::vector<ParamGroup>& groups, const std::vector<Tensor>& grads, const AdamConfig& cfg,
               std::uint64_t t);

}  // namespace gas
