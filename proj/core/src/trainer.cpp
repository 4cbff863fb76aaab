#include "advalstm/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "advalstm/error.hpp"
#include "advalstm/layers.hpp"
#include "advalstm/objective.hpp"

namespace advalstm::train {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void check_examples(std::span<const market::Example> examples, const nn::ModelDims& dims,
                    std::string_view split) {
  for (const auto& ex : examples) {
    if (ex.window.size() != dims.lag) {
      fail(ErrorKind::kShape, std::string(split) + " example window has length " +
                                  std::to_string(ex.window.size()) + ", model lag is " +
                                  std::to_string(dims.lag));
    }
  }
  if (dims.features != market::kFeatureCount) {
    fail(ErrorKind::kShape, "model feature count must be " + std::to_string(market::kFeatureCount));
  }
}

}  // namespace

std::string_view to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::kNormal: return "normal";
    case TrainMode::kAdversarial: return "adversarial";
    case TrainMode::kRandomPerturbation: return "random_perturbation";
  }
  return "?";
}

std::optional<TrainMode> parse_train_mode(std::string_view text) {
  if (text == "normal") return TrainMode::kNormal;
  if (text == "adversarial") return TrainMode::kAdversarial;
  if (text == "random_perturbation" || text == "random") return TrainMode::kRandomPerturbation;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0 && beta >= 0.0 && epsilon >= 0.0)) {
    fail(ErrorKind::kContract, "alpha, beta and epsilon must be non-negative");
  }
  if (batch_size < 1) fail(ErrorKind::kContract, "batch_size must be at least 1");
  if (!(adam.learning_rate > 0.0)) fail(ErrorKind::kContract, "learning_rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    fail(ErrorKind::kContract, "Adam decay rates must lie in [0, 1)");
  }
}

SplitScore score_split(std::span<const market::Example> examples, const nn::ParamSet& params) {
  if (examples.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  double loss = 0.0;
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    const double score = nn::forward(params, ex.window).score;
    loss += hinge_loss(ex.label, score);
    if (nn::classify(score) == ex.label) ++correct;
  }
  const double n = static_cast<double>(examples.size());
  return {loss / n, 100.0 * static_cast<double>(correct) / n};
}

TrainResult train(std::span<const market::Example> train_set,
                  std::span<const market::Example> validation_set, const nn::ModelDims& dims,
                  const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  dims.validate();
  if (train_set.empty()) fail(ErrorKind::kContract, "training split is empty");
  check_examples(train_set, dims, "train");
  check_examples(validation_set, dims, "validation");

  TrainResult result;
  nn::ParamSet params = nn::ParamSet::initialize(dims, config.seed);
  AdamState adam = AdamState::for_params(params);

  auto record_epoch = [&](std::size_t epoch) {
    const SplitScore tr = score_split(train_set, params);
    const SplitScore va = score_split(validation_set, params);
    EpochRecord rec{epoch, tr.mean_loss, va.mean_loss, va.accuracy};
    if (!std::isfinite(rec.train_loss)) {
      fail(ErrorKind::kNumeric, "training diverged: loss is not finite after epoch " +
                                    std::to_string(epoch));
    }
    result.curve.push_back(rec);
    if (on_epoch) on_epoch(rec);
    return rec;
  };

  record_epoch(0);
  result.params = params;
  result.best_epoch = 0;
  if (config.epochs == 0) return result;

  const bool has_validation = !validation_set.empty();
  double best_acc = -1.0;
  std::size_t since_best = 0;
  std::mt19937_64 shuffle_rng(derive_seed(config.seed, 1));
  std::vector<market::Example> batch;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double n_train = static_cast<double>(train_set.size());
  std::uint64_t update = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);
      const double data_scale = n_train / static_cast<double>(batch.size());

      Objective obj;
      try {
        switch (config.mode) {
          case TrainMode::kNormal:
            obj = objective_normal(batch, params, config.alpha, data_scale);
            break;
          case TrainMode::kAdversarial:
            obj = objective_adversarial(batch, params, config.alpha, config.beta, config.epsilon,
                                        data_scale);
            break;
          case TrainMode::kRandomPerturbation:
            obj = objective_random(batch, params, config.alpha, config.beta, config.epsilon,
                                   derive_seed(config.seed, 2 + update), data_scale);
            break;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNumeric) throw;
        fail(ErrorKind::kNumeric, "training diverged at epoch " + std::to_string(epoch) +
                                      ", update " + std::to_string(update) + " (" + e.what() + ")");
      }
      adam_step(params, obj.grads, adam, config.adam);
      ++update;
    }

    const EpochRecord rec = record_epoch(epoch);
    if (!has_validation) {
      result.params = params;
      result.best_epoch = epoch;
      continue;
    }
    if (rec.val_acc > best_acc) {
      best_acc = rec.val_acc;
      result.params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (config.patience > 0 && ++since_best >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace advalstm::train
