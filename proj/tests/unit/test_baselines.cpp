#include <gtest/gtest.h>

#include <algorithm>

#include "advalstm/baselines.hpp"
#include "advalstm/error.hpp"
#include "generators.hpp"

using namespace advalstm;
using namespace advalstm::baselines;

TEST(Momentum, Trends) {
  std::vector<double> rising, falling;
  for (int i = 0; i < 11; ++i) {
    rising.push_back(10 + i);
    falling.push_back(30 - i);
  }
  EXPECT_EQ(mom_predict(rising, 10), 1);
  EXPECT_EQ(mom_predict(falling, 10), -1);
  EXPECT_EQ(mom_predict(std::vector<double>(11, 5.0), 10), 1);
}

TEST(Momentum, InsufficientHistory) {
  const std::vector<double> p(10, 1.0);
  try {
    mom_predict(p, 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kWindow);
  }
}

TEST(Momentum, ReversedWindowFlipsSign) {
  fx::Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = fx::random_prices(rng, 11);
    if (p.front() == p.back()) continue;
    auto r = p;
    std::reverse(r.begin(), r.end());
    EXPECT_EQ(mom_predict(p, 10), -mom_predict(r, 10));
  }
}

TEST(MeanReversion, Cases) {
  std::vector<double> p(30, 100.0);
  EXPECT_EQ(mr_predict(p, 29), 1);  // on the mean
  p[29] = 100.0 * 1.1 * 30 / (29 + 1.1);  // 10% above the 30-day mean
  EXPECT_EQ(mr_predict(p, 29), -1);
  p[29] = 90.0;
  EXPECT_EQ(mr_predict(p, 29), 1);
  try {
    mr_predict(p, 28);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kWindow);
  }
}

TEST(Indicators, ScaleInvariant) {
  fx::Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = fx::random_prices(rng, 40);
    const double c = fx::uniform(rng, 0.1, 10.0);
    auto q = p;
    for (auto& v : q) v *= c;
    for (std::size_t t = 30; t < 40; ++t) {
      EXPECT_EQ(mom_predict(p, t), mom_predict(q, t));
      EXPECT_EQ(mr_predict(p, t), mr_predict(q, t));
    }
  }
}

TEST(Indicators, ConfigValidation) {
  IndicatorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.mom_window = 1;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Indicators, PredictFromTable) {
  fx::Rng rng(3);
  market::StockFeatures s;
  s.stock_id = "X";
  const std::chrono::sys_days start = std::chrono::year{2014} / 1 / 1;
  s.adj_close = fx::random_prices(rng, 50);
  for (int i = 0; i < 50; ++i) s.dates.push_back(market::Date{start + std::chrono::days{i}});
  market::Example ex;
  ex.stock_id = "X";
  ex.anchor_date = s.dates[40];
  ex.label = 1;
  const auto out = predict_baselines({s}, std::vector<market::Example>{ex}, {});
  ASSERT_EQ(out.mom.size(), 1u);
  EXPECT_EQ(out.mom[0].predicted, mom_predict(s.adj_close, 40, 10));
  EXPECT_EQ(out.mr[0].predicted, mr_predict(s.adj_close, 40, 30));
  ex.stock_id = "Y";
  try {
    predict_baselines({s}, std::vector<market::Example>{ex}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMismatch);
  }
}
