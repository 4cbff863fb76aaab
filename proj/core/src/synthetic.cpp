#include "advalstm/synthetic.hpp"

#include <array>
#include <chrono>
#include <random>
#include <string>

#include "advalstm/error.hpp"

namespace advalstm::synthetic {

namespace {

// Sign of each feature's response to a rising regime: intraday ratios
// barely move, returns rise, moving-average ratios fall below the price.
constexpr std::array<double, market::kFeatureCount> kTrendPattern{
    0.0, 0.5, -0.5, 1.0, 1.0, -0.5, -0.75, -1.0, -1.0, -1.0, -1.0};

}  // namespace

market::SplitDataset make_two_regime(const TwoRegimeSpec& spec) {
  if (spec.examples == 0 || spec.lag == 0) fail(ErrorKind::kContract, "synthetic task needs examples and lag");
  if (!(spec.label_noise >= 0.0 && spec.label_noise <= 1.0)) {
    fail(ErrorKind::kContract, "label_noise must lie in [0, 1]");
  }
  if (!(spec.train_fraction > 0.0 && spec.validation_fraction >= 0.0 &&
        spec.train_fraction + spec.validation_fraction <= 1.0)) {
    fail(ErrorKind::kContract, "split fractions must be positive and sum to at most 1");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution up(0.5);
  std::bernoulli_distribution flip(spec.label_noise);

  const auto n_train = static_cast<std::size_t>(spec.train_fraction * static_cast<double>(spec.examples));
  const auto n_val =
      static_cast<std::size_t>(spec.validation_fraction * static_cast<double>(spec.examples));
  const std::chrono::sys_days start = std::chrono::year{2000} / 1 / 1;

  market::SplitDataset out;
  for (std::size_t i = 0; i < spec.examples; ++i) {
    const double regime = up(rng) ? 1.0 : -1.0;
    market::Example ex;
    ex.stock_id = "SYN";
    ex.anchor_date = market::Date{start + std::chrono::days{static_cast<long>(i)}};
    for (std::size_t t = 0; t < spec.lag; ++t) {
      market::FeatureVector f{};
      for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = regime * spec.trend * kTrendPattern[k] + spec.noise * gauss(rng);
      }
      ex.window.push_back(f);
    }
    const double label = flip(rng) ? -regime : regime;
    ex.label = static_cast<int>(label);
    ex.movement_percent = label;
    if (i < n_train) {
      out.train.push_back(std::move(ex));
    } else if (i < n_train + n_val) {
      out.validation.push_back(std::move(ex));
    } else {
      out.test.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace advalstm::synthetic
