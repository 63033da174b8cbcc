#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "gas/error.hpp"

namespace gas {

// Dense row-major tensor of doubles. Rank 1 and 2 cover everything the model
// needs; higher ranks are representable but unused.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {}

  static Tensor zeros(std::vector<std::size_t> s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return Tensor{std::move(s), std::vector<double>(n, 0.0)};
  }
  static Tensor vector(std::vector<double> d) { return Tensor{{d.size()}, std::move(d)}; }
  static Tensor scalar(double v) { return Tensor{{1}, {v}}; }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t rows() const { return shape.at(0); }
  std::size_t cols() const { return shape.at(1); }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
  double& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

inline std::string shape_str(const Tensor& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(t.shape[i]);
  }
  return s + "]";
}

inline void require_finite(const Tensor& t, const char* what) {
  if (!t.all_finite()) throw NumericError(std::string("non-finite value in ") + what);
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b))
    throw DimensionError(std::string(what) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

// y = W x, W is [m x k], x is [k].
inline void matvec_into(const Tensor& w, const double* x, std::size_t xlen, double* y) {
  if (w.rank() != 2 || w.cols() != xlen)
    throw DimensionError("matvec: " + shape_str(w) + " against vector of length " + std::to_string(xlen));
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double* row = w.data.data() + r * xlen;
    double acc = 0.0;
    for (std::size_t c = 0; c < xlen; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

inline Tensor matvec(const Tensor& w, const Tensor& x) {
  Tensor y = Tensor::zeros({w.rows()});
  matvec_into(w, x.data.data(), x.size(), y.data.data());
  return y;
}

// y += W^T g, the gradient counterpart of matvec with respect to x.
inline void matvec_transpose_accum(const Tensor& w, const double* g, double* y) {
  const std::size_t k = w.cols();
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double* row = w.data.data() + r * k;
    const double gr = g[r];
    if (gr == 0.0) continue;
    for (std::size_t c = 0; c < k; ++c) y[c] += row[c] * gr;
  }
}

inline double dot(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace gas
