#include "advalstm/adam.hpp"

#include <cmath>

#include "advalstm/error.hpp"

namespace advalstm::train {

AdamState AdamState::for_params(const nn::ParamSet& params) {
  return {0, nn::ParamSet::zeros(params.dims()), nn::ParamSet::zeros(params.dims())};
}

void adam_step(nn::ParamSet& params, const nn::ParamSet& grads, AdamState& state,
               const AdamConfig& config) {
  params.check_same_shape(grads, "adam_step gradients");
  params.check_same_shape(state.first_moment, "adam_step first moment");
  params.check_same_shape(state.second_moment, "adam_step second moment");

  ++state.step;
  const double step = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, step);
  const double correction2 = 1.0 - std::pow(config.beta2, step);
  for (std::size_t k = 0; k < nn::kParamCount; ++k) {
    auto p = params.tensors()[k].data();
    auto g = grads.tensors()[k].data();
    auto m = state.first_moment.tensors()[k].data();
    auto v = state.second_moment.tensors()[k].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace advalstm::train
