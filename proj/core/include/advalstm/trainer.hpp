#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "advalstm/adam.hpp"
#include "advalstm/market_data.hpp"
#include "advalstm/params.hpp"

namespace advalstm::train {

enum class TrainMode { kNormal, kAdversarial, kRandomPerturbation };

std::string_view to_string(TrainMode mode);
std::optional<TrainMode> parse_train_mode(std::string_view text);

struct TrainConfig {
  TrainMode mode = TrainMode::kAdversarial;
  double alpha = 0.01;    // L2 coefficient (lambda in the grid)
  double beta = 0.05;     // weight of the perturbed-branch loss
  double epsilon = 0.01;  // perturbation radius
  AdamConfig adam;
  std::size_t batch_size = 1024;
  std::size_t epochs = 150;
  std::size_t patience = 20;  // 0 disables early stopping
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean clean hinge loss over the training split
  double val_loss = 0.0;    // NaN when the validation split is empty
  double val_acc = 0.0;     // percent; NaN when the validation split is empty
};

struct TrainResult {
  nn::ParamSet params;  // best-validation-accuracy epoch
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> curve;  // epoch 0 is the initialization
  bool stopped_early = false;
};

/// Mean clean hinge loss and accuracy (percent) of `params` on `examples`.
struct SplitScore {
  double mean_loss = 0.0;
  double accuracy = 0.0;
};
SplitScore score_split(std::span<const market::Example> examples, const nn::ParamSet& params);

/// Seeded mini-batch Adam over the training split. Parameters are kept
/// from the epoch with the best validation accuracy (earliest on ties).
/// Throws a numeric error if the objective diverges.
TrainResult train(std::span<const market::Example> train_set,
                  std::span<const market::Example> validation_set, const nn::ModelDims& dims,
                  const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace advalstm::train
