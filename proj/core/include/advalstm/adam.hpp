#pragma once

#include <cstdint>

#include "advalstm/params.hpp"

namespace advalstm::train {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::uint64_t step = 0;
  nn::ParamSet first_moment;
  nn::ParamSet second_moment;

  static AdamState for_params(const nn::ParamSet& params);
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(nn::ParamSet& params, const nn::ParamSet& grads, AdamState& state,
               const AdamConfig& config);

}  // namespace advalstm::train
