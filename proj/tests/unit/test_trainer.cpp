#include <gtest/gtest.h>

#include "advalstm/error.hpp"
#include "advalstm/synthetic.hpp"
#include "advalstm/trainer.hpp"

using namespace advalstm;
using namespace advalstm::train;

namespace {

nn::ModelDims dims(std::size_t lag = 5) {
  nn::ModelDims d;
  d.mapping = 4;
  d.hidden = 4;
  d.lag = lag;
  return d;
}

market::SplitDataset task(std::uint64_t seed, double label_noise = 0.1, std::size_t n = 600) {
  synthetic::TwoRegimeSpec s;
  s.examples = n;
  s.seed = seed;
  s.label_noise = label_noise;
  s.trend = 0.05;
  s.noise = 0.02;
  return synthetic::make_two_regime(s);
}

TrainConfig config(TrainMode mode, std::size_t epochs) {
  TrainConfig c;
  c.mode = mode;
  c.epochs = epochs;
  c.batch_size = 64;
  c.alpha = 0.01;
  c.beta = 0.5;
  c.epsilon = 0.05;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Synthetic, SplitsAndLabelNoise) {
  synthetic::TwoRegimeSpec s;
  s.examples = 10000;
  s.label_noise = 0.1;
  const auto d = synthetic::make_two_regime(s);
  EXPECT_EQ(d.train.size(), 6000u);
  EXPECT_EQ(d.validation.size(), 2000u);
  EXPECT_EQ(d.test.size(), 2000u);
  // Regime sign is readable from the fourth feature's mean over the window.
  std::size_t flipped = 0;
  for (const auto& ex : d.train) {
    double m = 0;
    for (const auto& f : ex.window) m += f[3];
    if ((m > 0 ? 1 : -1) != ex.label) ++flipped;
  }
  const double rate = static_cast<double>(flipped) / d.train.size();
  EXPECT_GT(rate, 0.07);
  EXPECT_LT(rate, 0.16);
}

TEST(Train, ZeroEpochsReturnsInitialization) {
  const auto d = task(1);
  auto c = config(TrainMode::kNormal, 0);
  const auto r = train::train(d.train, d.validation, dims(), c);
  EXPECT_EQ(r.params, nn::ParamSet::initialize(dims(), c.seed));
  EXPECT_EQ(r.best_epoch, 0u);
  ASSERT_EQ(r.curve.size(), 1u);
  EXPECT_EQ(r.curve[0].epoch, 0u);
}

TEST(Train, SameSeedIsBitIdentical) {
  const auto d = task(2);
  for (auto mode : {TrainMode::kNormal, TrainMode::kAdversarial, TrainMode::kRandomPerturbation}) {
    const auto c = config(mode, 4);
    const auto a = train::train(d.train, d.validation, dims(), c);
    const auto b = train::train(d.train, d.validation, dims(), c);
    EXPECT_EQ(a.params, b.params);
    ASSERT_EQ(a.curve.size(), b.curve.size());
    for (std::size_t i = 0; i < a.curve.size(); ++i) {
      EXPECT_EQ(a.curve[i].train_loss, b.curve[i].train_loss);
      EXPECT_EQ(a.curve[i].val_loss, b.curve[i].val_loss);
    }
  }
}

TEST(Train, SeparableTaskLossDecreasesForFiveEpochs) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto d = task(seed, 0.0);
    auto c = config(TrainMode::kNormal, 5);
    c.seed = seed;
    c.batch_size = 1024;
    c.patience = 0;
    const auto r = train::train(d.train, d.validation, dims(), c);
    ASSERT_EQ(r.curve.size(), 6u);
    for (std::size_t e = 1; e < r.curve.size(); ++e) {
      EXPECT_LT(r.curve[e].train_loss, r.curve[e - 1].train_loss) << "seed " << seed << " epoch " << e;
    }
  }
}

TEST(Train, BetaZeroAdversarialMatchesNormal) {
  const auto d = task(4);
  auto normal = config(TrainMode::kNormal, 3);
  auto adv = config(TrainMode::kAdversarial, 3);
  adv.beta = 0.0;
  const auto a = train::train(d.train, d.validation, dims(), normal);
  const auto b = train::train(d.train, d.validation, dims(), adv);
  EXPECT_EQ(a.params, b.params);
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    EXPECT_EQ(a.curve[i].train_loss, b.curve[i].train_loss);
    EXPECT_EQ(a.curve[i].val_acc, b.curve[i].val_acc);
  }
}

TEST(Train, SelectsBestValidationEpochAndStopsEarly) {
  const auto d = task(5);
  auto c = config(TrainMode::kNormal, 60);
  c.patience = 3;
  const auto r = train::train(d.train, d.validation, dims(), c);
  double best = -1;
  std::size_t best_epoch = 0;
  for (const auto& rec : r.curve) {
    if (rec.epoch > 0 && rec.val_acc > best) {
      best = rec.val_acc;
      best_epoch = rec.epoch;
    }
  }
  EXPECT_EQ(r.best_epoch, best_epoch);
  if (r.stopped_early) EXPECT_EQ(r.curve.back().epoch, best_epoch + c.patience);
  const auto score = score_split(d.validation, r.params);
  EXPECT_EQ(score.accuracy, best);
}

TEST(Train, EmptyValidationKeepsLastEpoch) {
  const auto d = task(6);
  const auto c = config(TrainMode::kAdversarial, 3);
  const auto r = train::train(d.train, {}, dims(), c);
  EXPECT_EQ(r.best_epoch, 3u);
}

TEST(Train, Preconditions) {
  const auto d = task(7);
  auto c = config(TrainMode::kNormal, 1);
  try {
    train::train(d.train, d.validation, dims(4), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
  try {
    train::train({}, d.validation, dims(), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kContract);
  }
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), Error);
  c = config(TrainMode::kNormal, 1);
  c.alpha = -1;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Train, DivergenceIsNumericError) {
  const auto d = task(8);
  auto c = config(TrainMode::kNormal, 5);
  c.adam.learning_rate = 1e200;
  c.alpha = 1.0;
  try {
    train::train(d.train, d.validation, dims(), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
  }
}

TEST(Train, ModeNames) {
  for (auto m : {TrainMode::kNormal, TrainMode::kAdversarial, TrainMode::kRandomPerturbation}) {
    EXPECT_EQ(parse_train_mode(to_string(m)), m);
  }
  EXPECT_FALSE(parse_train_mode("fgsm").has_value());
}
