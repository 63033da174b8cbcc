#include "gas/lstm.hpp"

#include <cmath>

#include "gas/nn.hpp"

namespace gas {

namespace {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

LstmCellParams LstmCellParams::init(std::size_t input_dim, std::size_t hidden, Rng& rng) {
  LstmCellParams cell;
  cell.input_dim = input_dim;
  cell.hidden = hidden;
  cell.w_input = init_uniform({4 * hidden, input_dim}, rng);
  cell.w_recurrent = Tensor::zeros({4 * hidden, hidden});
  for (std::size_t gate = 0; gate < 4; ++gate) {
    Tensor block = init_orthogonal(hidden, hidden, rng);
    for (std::size_t r = 0; r < hidden; ++r)
      for (std::size_t c = 0; c < hidden; ++c) cell.w_recurrent.at(gate * hidden + r, c) = block.at(r, c);
  }
  cell.bias = init_uniform({4 * hidden}, rng);
  // forget gate bias starts at 1
  for (std::size_t i = hidden; i < 2 * hidden; ++i) cell.bias[i] = 1.0;
  return cell;
}

LstmState lstm_step(const LstmCellParams& cell, const Tensor& x, const Tensor& h_prev, const Tensor& c_prev) {
  const std::size_t n = cell.hidden;
  if (x.size() != cell.input_dim || h_prev.size() != n || c_prev.size() != n)
    throw DimensionError("lstm_step: input/state size mismatch");
  Tensor pre = Tensor::zeros({4 * n});
  matvec_into(cell.w_input, x.data.data(), x.size(), pre.data.data());
  Tensor rec = Tensor::zeros({4 * n});
  matvec_into(cell.w_recurrent, h_prev.data.data(), n, rec.data.data());
  for (std::size_t i = 0; i < 4 * n; ++i) pre[i] += rec[i] + cell.bias[i];

  LstmState out{Tensor::zeros({n}), Tensor::zeros({n})};
  for (std::size_t i = 0; i < n; ++i) {
    const double ig = sigmoid(pre[i]);
    const double fg = sigmoid(pre[n + i]);
    const double cand = std::tanh(pre[2 * n + i]);
    const double og = sigmoid(pre[3 * n + i]);
    out.c[i] = fg * c_prev[i] + ig * cand;
    out.h[i] = og * std::tanh(out.c[i]);
  }
  require_finite(out.h, "lstm_step hidden state");
  return out;
}

std::pair<std::vector<Tensor>, std::vector<Tensor>> encode_sequence(const LstmCellParams& fwd,
                                                                    const LstmCellParams& bwd,
                                                                    const std::vector<Tensor>& seq) {
  const std::size_t len = seq.size();
  std::vector<Tensor> fwd_states(len), bwd_states(len);
  LstmState s{Tensor::zeros({fwd.hidden}), Tensor::zeros({fwd.hidden})};
  for (std::size_t i = 0; i < len; ++i) {
    s = lstm_step(fwd, seq[i], s.h, s.c);
    fwd_states[i] = s.h;
  }
  s = LstmState{Tensor::zeros({bwd.hidden}), Tensor::zeros({bwd.hidden})};
  for (std::size_t i = len; i > 0; --i) {
    s = lstm_step(bwd, seq[i - 1], s.h, s.c);
    bwd_states[i - 1] = s.h;
  }
  return {std::move(fwd_states), std::move(bwd_states)};
}

}  // namespace gas
