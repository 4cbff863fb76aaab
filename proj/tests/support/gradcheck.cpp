#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace advalstm::fx {

GradCheckResult check_gradients(const std::function<double(const nn::ParamSet&)>& loss,
                                const nn::ParamSet& params, const nn::ParamSet& analytic,
                                double step, double resolvable) {
  GradCheckResult result;
  nn::ParamSet probe = params;
  for (std::size_t p = 0; p < nn::kParamCount; ++p) {
    auto& tensor = probe.tensors()[p];
    const auto& grad = analytic.tensors()[p];
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double saved = tensor[i];
      tensor[i] = saved + step;
      const double plus = loss(probe);
      tensor[i] = saved - step;
      const double minus = loss(probe);
      tensor[i] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double a = grad[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst = std::string(nn::ParamSet::name(p)) + "[" + std::to_string(i) + "]";
      }
      if (denom > resolvable && rel > result.max_rel_error_resolved) {
        result.max_rel_error_resolved = rel;
        result.worst_resolved = std::string(nn::ParamSet::name(p)) + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

}  // namespace advalstm::fx
