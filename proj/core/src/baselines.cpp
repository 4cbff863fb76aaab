#include "advalstm/baselines.hpp"

#include <map>
#include <string>

#include "advalstm/error.hpp"

namespace advalstm::baselines {

void IndicatorConfig::validate() const {
  if (mom_window < 2 || mr_window < 2) fail(ErrorKind::kContract, "indicator windows must be >= 2");
}

int mom_predict(std::span<const double> adj_close, std::size_t t, std::size_t window) {
  if (t >= adj_close.size() || t < window) {
    fail(ErrorKind::kWindow, "momentum at day " + std::to_string(t) + " needs " +
                                 std::to_string(window + 1) + " days of history");
  }
  return adj_close[t] - adj_close[t - window] >= 0.0 ? 1 : -1;
}

int mr_predict(std::span<const double> adj_close, std::size_t t, std::size_t window) {
  if (t >= adj_close.size() || t + 1 < window) {
    fail(ErrorKind::kWindow, "mean reversion at day " + std::to_string(t) + " needs " +
                                 std::to_string(window) + " days of history");
  }
  double sum = 0.0;
  for (std::size_t i = t + 1 - window; i <= t; ++i) sum += adj_close[i];
  const double mean = sum / static_cast<double>(window);
  return adj_close[t] - mean > 0.0 ? -1 : 1;
}

BaselinePredictions predict_baselines(const market::FeatureTable& table,
                                      std::span<const market::Example> examples,
                                      const IndicatorConfig& config) {
  config.validate();
  std::map<std::string, const market::StockFeatures*, std::less<>> by_id;
  for (const auto& s : table) by_id[s.stock_id] = &s;

  BaselinePredictions out;
  for (const auto& ex : examples) {
    const auto it = by_id.find(ex.stock_id);
    if (it == by_id.end()) fail(ErrorKind::kMismatch, "stock " + ex.stock_id + " not in feature table");
    const auto day = it->second->day_index(ex.anchor_date);
    if (!day) {
      fail(ErrorKind::kMismatch, "anchor " + market::format_date(ex.anchor_date) +
                                     " missing for stock " + ex.stock_id);
    }
    const auto& prices = it->second->adj_close;
    out.mom.push_back(eval::make_record(ex, mom_predict(prices, *day, config.mom_window)));
    out.mr.push_back(eval::make_record(ex, mr_predict(prices, *day, config.mr_window)));
  }
  return out;
}

}  // namespace advalstm::baselines
