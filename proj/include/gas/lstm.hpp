#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "gas/rng.hpp"
#include "gas/tensor.hpp"

namespace gas {

// One LSTM direction. Gates are stacked row-wise in the order
// input, forget, candidate, output; each block has `hidden` rows.
struct LstmCellParams {
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  Tensor w_input;      // [4h x input_dim]
  Tensor w_recurrent;  // [4h x h], orthogonal per-gate blocks at init
  Tensor bias;         // [4h], forget block initialized to 1

  static LstmCellParams init(std::size_t input_dim, std::size_t hidden, Rng& rng);
};

struct LstmState {
  Tensor h;
  Tensor c;
};

// Standard recurrence: sigmoid gates, tanh candidate, elementwise cell update.
LstmState lstm_step(const LstmCellParams& cell, const Tensor& x, const Tensor& h_prev, const Tensor& c_prev);

// Runs `fwd` left-to-right and `bwd` right-to-left over `seq`.
// fwd_states[i] is the forward hidden state after seq[0..=i];
// bwd_states[i] is the backward hidden state after seq[end..=i].
std::pair<std::vector<Tensor>, std::vector<Tensor>> encode_sequence(const LstmCellParams& fwd,
                                                                    const LstmCellParams& bwd,
                                                                    const std::vector<Tensor>& seq);

}  // namespace gas
