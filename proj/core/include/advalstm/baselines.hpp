#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "advalstm/evaluation.hpp"
#include "advalstm/market_data.hpp"

namespace advalstm::baselines {

struct IndicatorConfig {
  std::size_t mom_window = 10;
  std::size_t mr_window = 30;

  void validate() const;
};

/// Momentum: sign(adj_close[t] - adj_close[t - window]); a flat trend is +1.
int mom_predict(std::span<const double> adj_close, std::size_t t, std::size_t window = 10);

/// Mean reversion: -sign(adj_close[t] - mean of the last `window` closes
/// ending at t); a price on its mean is +1.
int mr_predict(std::span<const double> adj_close, std::size_t t, std::size_t window = 30);

struct BaselinePredictions {
  std::vector<eval::PredictionRecord> mom;
  std::vector<eval::PredictionRecord> mr;
};

/// Indicator predictions for every example, reading price history from the
/// dataset's feature table. Confidence is the ±1 prediction itself.
BaselinePredictions predict_baselines(const market::FeatureTable& table,
                                      std::span<const market::Example> examples,
                                      const IndicatorConfig& config);

}  // namespace advalstm::baselines
