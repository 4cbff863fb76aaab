#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advalstm/market_data.hpp"
#include "advalstm/params.hpp"

namespace advalstm::eval {

struct PredictionRecord {
  std::string stock_id;
  market::Date anchor_date;
  int label = 0;
  double confidence = 0.0;  // y_hat
  int predicted = 0;        // +1 iff confidence >= 0
};

PredictionRecord make_record(const market::Example& example, double confidence);

struct Confusion {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t n() const { return tp + tn + fp + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

Confusion confusion(std::span<const PredictionRecord> records);

/// 100 * correct / n. Throws a contract error on an empty set.
double accuracy(std::span<const PredictionRecord> records);
double accuracy(const Confusion& counts);
/// Matthews correlation; 0 whenever a denominator factor is zero.
double mcc(std::span<const PredictionRecord> records);
double mcc(const Confusion& counts);

struct MetricsReport {
  double acc = 0.0;
  double mcc = 0.0;
  std::size_t n = 0;
  Confusion counts;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

MetricsReport evaluate(std::span<const PredictionRecord> records);

std::vector<PredictionRecord> predict(std::span<const market::Example> examples,
                                      const nn::ParamSet& params);
/// Re-predicts every example from e + r_adv, the fast-gradient
/// perturbation against `params` at radius `epsilon`.
std::vector<PredictionRecord> predict_attacked(std::span<const market::Example> examples,
                                               const nn::ParamSet& params, double epsilon);

/// (attacked - clean) / clean; missing when clean is zero.
std::optional<double> relative_change(double clean, double attacked);

struct RelativeDecrease {
  std::optional<double> acc;
  std::optional<double> mcc;
};

RelativeDecrease rpd(const MetricsReport& clean, const MetricsReport& attacked);

/// Relative improvement of `best` over `baseline`, in percent.
std::optional<double> relative_improvement(double best, double baseline);

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t count = 0;
};

struct ConfidenceHistogram {
  std::vector<HistogramBin> bins;
  double min = 0.0;
  double max = 0.0;
  double mean_abs = 0.0;
};

/// Equal-width bins over [low, high]; values outside land in the edge bins.
ConfidenceHistogram confidence_histogram(std::span<const PredictionRecord> records,
                                         std::size_t bins, double low, double high);
/// Range symmetric around zero, wide enough for every confidence.
ConfidenceHistogram confidence_histogram(std::span<const PredictionRecord> records,
                                         std::size_t bins);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
};

MeanStd mean_std(std::span<const double> values);

struct MultiRunSummary {
  std::size_t runs = 0;
  MeanStd acc;
  MeanStd mcc;
};

MultiRunSummary multi_run_report(std::span<const MetricsReport> runs);

/// "57.20±0.50" style rendering.
std::string format_mean_std(const MeanStd& value, int precision);

// CSV writers for external plotting and comparison.
void write_predictions_csv(std::ostream& out, std::span<const PredictionRecord> records);
std::vector<PredictionRecord> read_predictions_csv(std::istream& in, std::string_view source);
void write_histogram_csv(std::ostream& out, const ConfidenceHistogram& histogram);

}  // namespace advalstm::eval
