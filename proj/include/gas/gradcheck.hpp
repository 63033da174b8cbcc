#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gas/tensor.hpp"

namespace gas {

struct GradCheckGroup {
  std::string name;
  Tensor* tensor = nullptr;  // probed in place
};

struct GradCheckResult {
  struct Row {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
  };
  std::vector<Row> rows;
  double max_rel_error = 0.0;

  bool pass(double tol) const { return max_rel_error <= tol; }
};

// Central differences against an analytic gradient. `loss` re-evaluates the
// deterministic loss from the current tensor contents; `analytic_grads[i]`
// matches `groups[i]`. Relative error per component is
// |a - n| / max(|a|, |n|, floor); NaN during probing is a hard error.
GradCheckResult grad_check(const std::function<double()>& loss, const std::vector<GradCheckGroup>& groups,
                           const std::vector<Tensor>& analytic_grads, double h = 1e-5, double floor = 1e-5);

}  // namespace gas
