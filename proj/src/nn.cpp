#include "gas/nn.hpp"

#include <algorithm>
#include <cmath>

namespace gas {

Tensor softmax(const Tensor& v) {
  if (v.size() == 0) throw DimensionError("softmax of empty vector");
  require_finite(v, "softmax input");
  double mx = v[0];
  for (std::size_t i = 1; i < v.size(); ++i) mx = std::max(mx, v[i]);
  Tensor out = Tensor::zeros({v.size()});
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (std::size_t i = 0; i < v.size(); ++i) out[i] /= sum;
  return out;
}

double cross_entropy(const Tensor& pred_dist, std::size_t gold_index) {
  if (gold_index >= pred_dist.size())
    throw DimensionError("cross_entropy: gold index " + std::to_string(gold_index) + " out of range for " +
                         std::to_string(pred_dist.size()) + " classes");
  double p = pred_dist[gold_index];
  if (p < 1e-12) p = 1e-12;
  return -std::log(p);
}

double cross_entropy_logits(const Tensor& logits, std::size_t gold_index) {
  if (gold_index >= logits.size()) throw DimensionError("cross_entropy_logits: gold index out of range");
  double mx = logits[0];
  for (std::size_t i = 1; i < logits.size(); ++i) mx = std::max(mx, logits[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) sum += std::exp(logits[i] - mx);
  return std::log(sum) - (logits[gold_index] - mx);
}

Tensor init_orthogonal(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows == 0 || cols == 0) throw DimensionError("init_orthogonal: empty shape");
  // Orthonormalize along the shorter dimension; transpose back if needed.
  const bool flip = rows > cols;
  const std::size_t r = flip ? cols : rows;
  const std::size_t c = flip ? rows : cols;
  // r <= c: build r orthonormal rows of length c by modified Gram-Schmidt
  // with one re-orthogonalization sweep.
  std::vector<std::vector<double>> q(r, std::vector<double>(c));
  for (auto& row : q)
    for (auto& x : row) x = rng.normal();
  for (std::size_t i = 0; i < r; ++i) {
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (std::size_t j = 0; j < i; ++j) {
        double proj = 0.0;
        for (std::size_t k = 0; k < c; ++k) proj += q[i][k] * q[j][k];
        for (std::size_t k = 0; k < c; ++k) q[i][k] -= proj * q[j][k];
      }
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < c; ++k) norm += q[i][k] * q[i][k];
    norm = std::sqrt(norm);
    if (norm < 1e-10) throw NumericError("init_orthogonal: degenerate draw");
    for (std::size_t k = 0; k < c; ++k) q[i][k] /= norm;
  }
  Tensor out = Tensor::zeros({rows, cols});
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out.at(i, j) = flip ? q[j][i] : q[i][j];
  return out;
}

Tensor init_uniform(std::vector<std::size_t> shape, Rng& rng, double lo, double hi) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (auto& x : t.data) x = rng.uniform(lo, hi);
  return t;
}

Tensor dropout_mask(std::size_t len, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) throw ValidationError("dropout rate must be in [0, 1)");
  Tensor m = Tensor::zeros({len});
  if (!training || rate == 0.0) {
    m.fill(1.0);
    return m;
  }
  const double keep = 1.0 / (1.0 - rate);
  for (auto& x : m.data) x = rng.uniform() < rate ? 0.0 : keep;
  return m;
}

void adam_step(std::vector<ParamGroup>& groups, const std::vector<Tensor>& grads, const AdamConfig& cfg,
               std::uint64_t t) {
  if (t < 1) throw ValidationError("adam_step: t must be >= 1");
  if (groups.size() != grads.size()) throw DimensionError("adam_step: group/grad count mismatch");
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    ParamGroup& g = groups[gi];
    if (!g.trainable) continue;
    const Tensor& grad = grads[gi];
    require_same_shape(*g.tensor, grad, "adam_step");
    if (g.adam_m.size() == 0) g.adam_m = Tensor::zeros(g.tensor->shape);
    if (g.adam_v.size() == 0) g.adam_v = Tensor::zeros(g.tensor->shape);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double gr = grad[i];
      g.adam_m[i] = cfg.beta1 * g.adam_m[i] + (1.0 - cfg.beta1) * gr;
      g.adam_v[i] = cfg.beta2 * g.adam_v[i] + (1.0 - cfg.beta2) * gr * gr;
      const double mhat = g.adam_m[i] / bc1;
      const double vhat = g.adam_v[i] / bc2;
      g.tensor->data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace gas
