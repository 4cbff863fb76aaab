#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "advalstm/market_data.hpp"
#include "advalstm/params.hpp"
#include "advalstm/trainer.hpp"

namespace advalstm::train {

struct GridSpec {
  std::vector<std::size_t> hidden;  // U
  std::vector<std::size_t> lag;     // T
  std::vector<double> lambda;       // L2 coefficient
  std::vector<double> beta;
  std::vector<double> epsilon;

  /// Default search ranges.
  static GridSpec standard();
  void validate() const;
  std::size_t cell_count() const {
    return hidden.size() * lag.size() * lambda.size() + beta.size() * epsilon.size();
  }
};

struct GridCell {
  int stage = 1;  // 1: (U, T, lambda) with normal training; 2: (beta, epsilon)
  std::size_t hidden = 0;
  std::size_t lag = 0;
  double lambda = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  double val_acc = 0.0;
  double val_mcc = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;  // evaluation order
  GridCell best_stage1;
  GridCell best;
};

/// Examples materialized for a given lag.
using DatasetProvider = std::function<market::SplitDataset(std::size_t lag)>;

/// Two-stage search: first (U, T, lambda) for the attentive LSTM trained
/// normally, then (beta, epsilon) for adversarial training at the stage-1
/// winner. Ties prefer smaller U, then smaller T, then smaller values.
GridResult grid_search(const GridSpec& grid, const DatasetProvider& data,
                       const nn::ModelDims& base_dims, const TrainConfig& base_config);

void write_grid_csv(std::ostream& out, const GridResult& result);

}  // namespace advalstm::train
