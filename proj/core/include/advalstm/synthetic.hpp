#pragma once

#include <cstddef>
#include <cstdint>

#include "advalstm/market_data.hpp"

namespace advalstm::synthetic {

/// Two-regime trend task: each example is drawn from an up or down regime
/// whose daily features are a regime-signed trend pattern plus Gaussian
/// noise; the observed label is flipped with probability `label_noise`.
struct TwoRegimeSpec {
  std::size_t examples = 2000;
  std::size_t lag = 5;
  double trend = 0.01;       // per-feature regime offset
  double noise = 0.01;       // feature noise standard deviation
  double label_noise = 0.1;  // probability of a flipped label
  double train_fraction = 0.6;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
};

market::SplitDataset make_two_regime(const TwoRegimeSpec& spec);

}  // namespace advalstm::synthetic
