#include "gas/gradcheck.hpp"

#include <cmath>

namespace gas {

GradCheckResult grad_check(const std::function<double()>& loss, const std::vector<GradCheckGroup>& groups,
                           const std::vector<Tensor>& analytic_grads, double h, double floor) {
  if (groups.size() != analytic_grads.size()) throw DimensionError("grad_check: group/grad count mismatch");
  GradCheckResult result;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    Tensor& t = *groups[gi].tensor;
    const Tensor& ag = analytic_grads[gi];
    require_same_shape(t, ag, "grad_check");
    GradCheckResult::Row row;
    row.name = groups[gi].name;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double saved = t[i];
      t[i] = saved + h;
      const double fp = loss();
      t[i] = saved - h;
      const double fm = loss();
      t[i] = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw NumericError("grad_check: NaN while probing group " + groups[gi].name);
      const double numeric = (fp - fm) / (2.0 * h);
      const double analytic = ag[i];
      const double denom = std::max({std::fabs(analytic), std::fabs(numeric), floor});
      const double rel = std::fabs(analytic - numeric) / denom;
      if (rel > row.max_rel_error) {
        row.max_rel_error = rel;
        row.worst_index = i;
        row.analytic = analytic;
        row.numeric = numeric;
      }
    }
    result.max_rel_error = std::max(result.max_rel_error, row.max_rel_error);
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace gas
