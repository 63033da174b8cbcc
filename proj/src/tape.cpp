#include "gas/tape.hpp"

#include <algorithm>
#include <memory>
#include <cmath>

namespace gas {

Var Tape::push(Tensor value, bool needs_grad, std::function<void()> back) {
  Node n;
  n.val = std::move(value);
  n.needs_grad = needs_grad;
  if (needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Tensor& Tape::grad_buf(Var v) {
  Node& n = nodes_[v.idx];
  if (n.grad.size() == 0) n.grad = Tensor::zeros(value(v).shape);
  return n.grad;
}

Var Tape::leaf(const Tensor* external) {
  Node n;
  n.ref = external;
  n.needs_grad = true;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::input(Tensor value) { return push(std::move(value), false, {}); }

Var Tape::zeros(std::size_t len) { return input(Tensor::zeros({len})); }

Var Tape::add(Var a, Var b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  require_same_shape(va, vb, "tape add");
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += vb[i];
  bool ng = requires_grad(a) || requires_grad(b);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, a, b, v] {
      const Tensor& g = grad_buf(v);
      if (requires_grad(a)) {
        Tensor& ga = grad_buf(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      }
      if (requires_grad(b)) {
        Tensor& gb = grad_buf(b);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
      }
    };
  }
  return v;
}

Var Tape::mul(Var a, Var b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  require_same_shape(va, vb, "tape mul");
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= vb[i];
  bool ng = requires_grad(a) || requires_grad(b);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, a, b, v] {
      const Tensor& g = grad_buf(v);
      if (requires_grad(a)) {
        Tensor& ga = grad_buf(a);
        const Tensor& vb2 = value(b);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * vb2[i];
      }
      if (requires_grad(b)) {
        Tensor& gb = grad_buf(b);
        const Tensor& va2 = value(a);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * va2[i];
      }
    };
  }
  return v;
}

Var Tape::scale(Var a, double s) {
  Tensor out = value(a);
  for (auto& x : out.data) x *= s;
  bool ng = requires_grad(a);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, a, s, v] {
      const Tensor& g = grad_buf(v);
      Tensor& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
    };
  }
  return v;
}

Var Tape::mask(Var a, Tensor m) {
  const Tensor& va = value(a);
  require_same_shape(va, m, "tape mask");
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= m[i];
  bool ng = requires_grad(a);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    auto mk = std::make_shared<Tensor>(std::move(m));
    nodes_[v.idx].back = [this, a, mk, v] {
      const Tensor& g = grad_buf(v);
      Tensor& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += (*mk)[i] * g[i];
    };
  }
  return v;
}

Var Tape::matvec(Var w, Var x) {
  const Tensor& vw = value(w);
  const Tensor& vx = value(x);
  Tensor out = Tensor::zeros({vw.rows()});
  matvec_into(vw, vx.data.data(), vx.size(), out.data.data());
  bool ng = requires_grad(w) || requires_grad(x);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, w, x, v] {
      const Tensor& g = grad_buf(v);
      const Tensor& vw2 = value(w);
      const Tensor& vx2 = value(x);
      if (requires_grad(w)) {
        Tensor& gw = grad_buf(w);
        const std::size_t k = vw2.cols();
        for (std::size_t r = 0; r < vw2.rows(); ++r) {
          const double gr = g[r];
          if (gr == 0.0) continue;
          double* row = gw.data.data() + r * k;
          for (std::size_t c = 0; c < k; ++c) row[c] += gr * vx2[c];
        }
      }
      if (requires_grad(x)) {
        Tensor& gx = grad_buf(x);
        matvec_transpose_accum(vw2, g.data.data(), gx.data.data());
      }
    };
  }
  return v;
}

Var Tape::affine(Var w, Var x, Var b) { return add(matvec(w, x), b); }

Var Tape::concat(const std::vector<Var>& parts) {
  std::size_t total = 0;
  for (Var p : parts) total += value(p).size();
  Tensor out = Tensor::zeros({total});
  std::size_t off = 0;
  bool ng = false;
  for (Var p : parts) {
    const Tensor& vp = value(p);
    std::copy(vp.data.begin(), vp.data.end(), out.data.begin() + off);
    off += vp.size();
    ng = ng || requires_grad(p);
  }
  Var v = push(std::move(out), ng, {});
  if (ng) {
    auto ps = std::make_shared<std::vector<Var>>(parts);
    nodes_[v.idx].back = [this, ps, v] {
      const Tensor& g = grad_buf(v);
      std::size_t o = 0;
      for (Var p : *ps) {
        const std::size_t len = value(p).size();
        if (requires_grad(p)) {
          Tensor& gp = grad_buf(p);
          for (std::size_t i = 0; i < len; ++i) gp[i] += g[o + i];
        }
        o += len;
      }
    };
  }
  return v;
}

Var Tape::slice(Var a, std::size_t offset, std::size_t len) {
  const Tensor& va = value(a);
  if (offset + len > va.size()) throw DimensionError("tape slice out of range");
  Tensor out = Tensor::zeros({len});
  std::copy(va.data.begin() + offset, va.data.begin() + offset + len, out.data.begin());
  bool ng = requires_grad(a);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, a, offset, len, v] {
      const Tensor& g = grad_buf(v);
      Tensor& ga = grad_buf(a);
      for (std::size_t i = 0; i < len; ++i) ga[offset + i] += g[i];
    };
  }
  return v;
}

Var Tape::sigmoid(Var a) {
  Tensor out = value(a);
  for (auto& x : out.data) x = 1.0 / (1.0 + std::exp(-x));
  bool ng = requires_grad(a);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, a, v] {
      const Tensor& g = grad_buf(v);
      const Tensor& y = value(v);
      Tensor& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
    };
  }
  return v;
}

Var Tape::tanh(Var a) {
  Tensor out = value(a);
  for (auto& x : out.data) x = std::tanh(x);
  bool ng = requires_grad(a);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, a, v] {
      const Tensor& g = grad_buf(v);
      const Tensor& y = value(v);
      Tensor& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
    };
  }
  return v;
}

Var Tape::relu(Var a) {
  Tensor out = value(a);
  for (auto& x : out.data) x = x > 0.0 ? x : 0.0;
  bool ng = requires_grad(a);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, a, v] {
      const Tensor& g = grad_buf(v);
      const Tensor& va = value(a);
      Tensor& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.size(); ++i)
        if (va[i] > 0.0) ga[i] += g[i];
    };
  }
  return v;
}

Var Tape::stack_dots(const std::vector<Var>& gs, Var m) {
  const Tensor& vm = value(m);
  Tensor out = Tensor::zeros({gs.size()});
  bool ng = requires_grad(m);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const Tensor& vg = value(gs[i]);
    require_same_shape(vg, vm, "stack_dots");
    double acc = 0.0;
    for (std::size_t k = 0; k < vg.size(); ++k) acc += vg[k] * vm[k];
    out[i] = acc;
    ng = ng || requires_grad(gs[i]);
  }
  Var v = push(std::move(out), ng, {});
  if (ng) {
    auto glist = std::make_shared<std::vector<Var>>(gs);
    nodes_[v.idx].back = [this, glist, m, v] {
      const Tensor& g = grad_buf(v);
      const Tensor& vm2 = value(m);
      for (std::size_t i = 0; i < glist->size(); ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        const Tensor& vg = value((*glist)[i]);
        if (requires_grad((*glist)[i])) {
          Tensor& gg = grad_buf((*glist)[i]);
          for (std::size_t k = 0; k < vm2.size(); ++k) gg[k] += gi * vm2[k];
        }
        if (requires_grad(m)) {
          Tensor& gm = grad_buf(m);
          for (std::size_t k = 0; k < vm2.size(); ++k) gm[k] += gi * vg[k];
        }
      }
    };
  }
  return v;
}

Var Tape::weighted_sum(const std::vector<Var>& gs, Var w) {
  const Tensor& vw = value(w);
  if (vw.size() != gs.size()) throw DimensionError("weighted_sum: weight count mismatch");
  if (gs.empty()) throw DimensionError("weighted_sum of empty list");
  Tensor out = Tensor::zeros(value(gs[0]).shape);
  bool ng = requires_grad(w);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const Tensor& vg = value(gs[i]);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += vw[i] * vg[k];
    ng = ng || requires_grad(gs[i]);
  }
  Var v = push(std::move(out), ng, {});
  if (ng) {
    auto glist = std::make_shared<std::vector<Var>>(gs);
    nodes_[v.idx].back = [this, glist, w, v] {
      const Tensor& g = grad_buf(v);
      const Tensor& vw2 = value(w);
      for (std::size_t i = 0; i < glist->size(); ++i) {
        const Tensor& vg = value((*glist)[i]);
        if (requires_grad((*glist)[i])) {
          Tensor& gg = grad_buf((*glist)[i]);
          for (std::size_t k = 0; k < g.size(); ++k) gg[k] += vw2[i] * g[k];
        }
        if (requires_grad(w)) {
          double acc = 0.0;
          for (std::size_t k = 0; k < g.size(); ++k) acc += g[k] * vg[k];
          grad_buf(w)[i] += acc;
        }
      }
    };
  }
  return v;
}

Var Tape::softmax(Var a) {
  const Tensor& va = value(a);
  if (va.size() == 0) throw DimensionError("softmax of empty vector");
  double mx = va[0];
  for (std::size_t i = 1; i < va.size(); ++i) mx = std::max(mx, va[i]);
  Tensor out = Tensor::zeros({va.size()});
  double sum = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    out[i] = std::exp(va[i] - mx);
    sum += out[i];
  }
  for (std::size_t i = 0; i < va.size(); ++i) out[i] /= sum;
  bool ng = requires_grad(a);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, a, v] {
      const Tensor& g = grad_buf(v);
      const Tensor& y = value(v);
      Tensor& ga = grad_buf(a);
      double gy = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) gy += g[i] * y[i];
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += y[i] * (g[i] - gy);
    };
  }
  return v;
}

Var Tape::mix(Var a, Var b, Var lambda) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  require_same_shape(va, vb, "tape mix");
  const double lam = value(lambda)[0];
  Tensor out = Tensor::zeros(va.shape);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lam * va[i] + (1.0 - lam) * vb[i];
  bool ng = requires_grad(a) || requires_grad(b) || requires_grad(lambda);
  Var v = push(std::move(out), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, a, b, lambda, v] {
      const Tensor& g = grad_buf(v);
      const Tensor& va2 = value(a);
      const Tensor& vb2 = value(b);
      const double lam2 = value(lambda)[0];
      if (requires_grad(a)) {
        Tensor& ga = grad_buf(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += lam2 * g[i];
      }
      if (requires_grad(b)) {
        Tensor& gb = grad_buf(b);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += (1.0 - lam2) * g[i];
      }
      if (requires_grad(lambda)) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * (va2[i] - vb2[i]);
        grad_buf(lambda)[0] += acc;
      }
    };
  }
  return v;
}

Var Tape::cross_entropy_logits(Var logits, std::size_t gold) {
  const Tensor& z = value(logits);
  if (gold >= z.size()) throw DimensionError("cross_entropy_logits: gold index out of range");
  double mx = z[0];
  for (std::size_t i = 1; i < z.size(); ++i) mx = std::max(mx, z[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += std::exp(z[i] - mx);
  const double loss = std::log(sum) - (z[gold] - mx);
  bool ng = requires_grad(logits);
  Var v = push(Tensor::scalar(loss), ng, {});
  if (ng) {
    nodes_[v.idx].back = [this, logits, gold, v] {
      const double g = grad_buf(v)[0];
      const Tensor& z2 = value(logits);
      double m2 = z2[0];
      for (std::size_t i = 1; i < z2.size(); ++i) m2 = std::max(m2, z2[i]);
      double s2 = 0.0;
      for (std::size_t i = 0; i < z2.size(); ++i) s2 += std::exp(z2[i] - m2);
      Tensor& gz = grad_buf(logits);
      for (std::size_t i = 0; i < z2.size(); ++i) {
        const double p = std::exp(z2[i] - m2) / s2;
        gz[i] += g * (p - (i == gold ? 1.0 : 0.0));
      }
    };
  }
  return v;
}

Tape::CellVars Tape::cell_leaves(const LstmCellParams& cell) {
  CellVars cv;
  cv.w_input = leaf(&cell.w_input);
  cv.w_recurrent = leaf(&cell.w_recurrent);
  cv.bias = leaf(&cell.bias);
  cv.input_dim = cell.input_dim;
  cv.hidden = cell.hidden;
  return cv;
}

std::pair<Var, Var> Tape::lstm_step(const CellVars& cell, Var x, Var h_prev, Var c_prev) {
  const std::size_t n = cell.hidden;
  Var pre = add(add(matvec(cell.w_input, x), matvec(cell.w_recurrent, h_prev)), cell.bias);
  Var ig = sigmoid(slice(pre, 0, n));
  Var fg = sigmoid(slice(pre, n, n));
  Var cand = tanh(slice(pre, 2 * n, n));
  Var og = sigmoid(slice(pre, 3 * n, n));
  Var c_new = add(mul(fg, c_prev), mul(ig, cand));
  Var h_new = mul(og, tanh(c_new));
  return {h_new, c_new};
}

Var Tape::run_lstm(const CellVars& cell, const std::vector<Var>& seq) {
  Var h = zeros(cell.hidden);
  Var c = zeros(cell.hidden);
  for (Var x : seq) {
    auto [h2, c2] = lstm_step(cell, x, h, c);
    h = h2;
    c = c2;
  }
  return h;
}

void Tape::backward(Var root) {
  if (value(root).size() != 1) throw DimensionError("backward root must be scalar");
  grad_buf(root)[0] = 1.0;
  for (std::size_t i = nodes_.size(); i > 0; --i) {
    Node& n = nodes_[i - 1];
    if (n.needs_grad && n.back && n.grad.size() != 0) n.back();
  }
}

}  // namespace gas
