#include "advalstm/grid_search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "advalstm/error.hpp"
#include "advalstm/evaluation.hpp"
#include "advalstm/text.hpp"

namespace advalstm::train {

namespace {

template <typename T>
std::vector<T> ascending(std::vector<T> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

double rank_value(double acc) { return std::isnan(acc) ? -1.0 : acc; }

void score_cell(GridCell& cell, const market::SplitDataset& data, const nn::ModelDims& dims,
                const TrainConfig& config) {
  const TrainResult run = train(data.train, data.validation, dims, config);
  if (data.validation.empty()) {
    cell.val_acc = std::nan("");
    cell.val_mcc = std::nan("");
    return;
  }
  const auto records = eval::predict(data.validation, run.params);
  const auto report = eval::evaluate(records);
  cell.val_acc = report.acc;
  cell.val_mcc = report.mcc;
}

}  // namespace

GridSpec GridSpec::standard() {
  return {{4, 8, 16, 32},
          {2, 3, 4, 5, 10, 15},
          {0.001, 0.01, 0.1, 1.0},
          {0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0},
          {0.001, 0.005, 0.01, 0.05, 0.1}};
}

void GridSpec::validate() const {
  if (hidden.empty() || lag.empty() || lambda.empty() || beta.empty() || epsilon.empty()) {
    fail(ErrorKind::kContract, "every grid dimension needs at least one candidate");
  }
  for (auto u : hidden) {
    if (u == 0) fail(ErrorKind::kContract, "grid hidden sizes must be positive");
  }
  for (auto t : lag) {
    if (t == 0) fail(ErrorKind::kContract, "grid lags must be positive");
  }
  for (const auto* list : {&lambda, &beta, &epsilon}) {
    for (double v : *list) {
      if (!(v >= 0.0)) fail(ErrorKind::kContract, "grid lambda/beta/epsilon must be >= 0");
    }
  }
}

GridResult grid_search(const GridSpec& grid, const DatasetProvider& data,
                       const nn::ModelDims& base_dims, const TrainConfig& base_config) {
  grid.validate();
  std::map<std::size_t, market::SplitDataset> by_lag;
  auto dataset = [&](std::size_t lag) -> const market::SplitDataset& {
    auto it = by_lag.find(lag);
    if (it == by_lag.end()) it = by_lag.emplace(lag, data(lag)).first;
    return it->second;
  };

  GridResult result;
  bool have_best = false;
  for (std::size_t hidden : ascending(grid.hidden)) {
    for (std::size_t lag : ascending(grid.lag)) {
      for (double lambda : ascending(grid.lambda)) {
        nn::ModelDims dims = base_dims;
        dims.hidden = hidden;
        dims.lag = lag;
        TrainConfig config = base_config;
        config.mode = TrainMode::kNormal;
        config.alpha = lambda;
        GridCell cell{1, hidden, lag, lambda, 0.0, 0.0, 0.0, 0.0};
        score_cell(cell, dataset(lag), dims, config);
        result.cells.push_back(cell);
        if (!have_best || rank_value(cell.val_acc) > rank_value(result.best_stage1.val_acc)) {
          result.best_stage1 = cell;
          have_best = true;
        }
      }
    }
  }

  const GridCell& anchor = result.best_stage1;
  nn::ModelDims dims = base_dims;
  dims.hidden = anchor.hidden;
  dims.lag = anchor.lag;
  have_best = false;
  for (double beta : ascending(grid.beta)) {
    for (double epsilon : ascending(grid.epsilon)) {
      TrainConfig config = base_config;
      config.mode = TrainMode::kAdversarial;
      config.alpha = anchor.lambda;
      config.beta = beta;
      config.epsilon = epsilon;
      GridCell cell{2, anchor.hidden, anchor.lag, anchor.lambda, beta, epsilon, 0.0, 0.0};
      score_cell(cell, dataset(anchor.lag), dims, config);
      result.cells.push_back(cell);
      if (!have_best || rank_value(cell.val_acc) > rank_value(result.best.val_acc)) {
        result.best = cell;
        have_best = true;
      }
    }
  }
  return result;
}

void write_grid_csv(std::ostream& out, const GridResult& result) {
  out << "U,T,lambda,beta,epsilon,val_acc,val_mcc\n";
  for (const auto& c : result.cells) {
    out << c.hidden << ',' << c.lag << ',' << text::format_double(c.lambda) << ','
        << text::format_double(c.beta) << ',' << text::format_double(c.epsilon) << ','
        << text::format_double(c.val_acc) << ',' << text::format_double(c.val_mcc) << '\n';
  }
}

}  // namespace advalstm::train
