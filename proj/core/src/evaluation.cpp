#include "advalstm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "advalstm/error.hpp"
#include "advalstm/layers.hpp"
#include "advalstm/objective.hpp"
#include "advalstm/text.hpp"

namespace advalstm::eval {

PredictionRecord make_record(const market::Example& example, double confidence) {
  return {example.stock_id, example.anchor_date, example.label, confidence,
          nn::classify(confidence)};
}

Confusion confusion(std::span<const PredictionRecord> records) {
  Confusion c;
  for (const auto& r : records) {
    if (r.label == 1) {
      (r.predicted == 1 ? c.tp : c.fn) += 1;
    } else {
      (r.predicted == 1 ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

double accuracy(const Confusion& c) {
  if (c.n() == 0) fail(ErrorKind::kContract, "accuracy of an empty prediction set");
  return 100.0 * static_cast<double>(c.tp + c.tn) / static_cast<double>(c.n());
}

double accuracy(std::span<const PredictionRecord> records) { return accuracy(confusion(records)); }

double mcc(const Confusion& c) {
  const auto tp = static_cast<double>(c.tp);
  const auto tn = static_cast<double>(c.tn);
  const auto fp = static_cast<double>(c.fp);
  const auto fn = static_cast<double>(c.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

double mcc(std::span<const PredictionRecord> records) { return mcc(confusion(records)); }

MetricsReport evaluate(std::span<const PredictionRecord> records) {
  const Confusion c = confusion(records);
  return {accuracy(c), mcc(c), c.n(), c};
}

std::vector<PredictionRecord> predict(std::span<const market::Example> examples,
                                      const nn::ParamSet& params) {
  std::vector<PredictionRecord> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(make_record(ex, nn::forward(params, ex.window).score));
  return out;
}

std::vector<PredictionRecord> predict_attacked(std::span<const market::Example> examples,
                                               const nn::ParamSet& params, double epsilon) {
  std::vector<PredictionRecord> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    const nn::ForwardTrace trace = nn::forward(params, ex.window);
    double score = trace.score;
    if (epsilon > 0.0) {
      if (auto adv = train::gen_adversarial(trace.repr, ex.label, params, epsilon)) {
        score = nn::head_score(adv->repr, params);
      }
    } else if (epsilon < 0.0) {
      fail(ErrorKind::kContract, "attack epsilon must be non-negative");
    }
    out.push_back(make_record(ex, score));
  }
  return out;
}

std::optional<double> relative_change(double clean, double attacked) {
  if (clean == 0.0) return std::nullopt;
  return (attacked - clean) / clean;
}

RelativeDecrease rpd(const MetricsReport& clean, const MetricsReport& attacked) {
  if (clean.n != attacked.n) fail(ErrorKind::kContract, "RPD needs reports over the same examples");
  return {relative_change(clean.acc, attacked.acc), relative_change(clean.mcc, attacked.mcc)};
}

std::optional<double> relative_improvement(double best, double baseline) {
  if (baseline == 0.0) return std::nullopt;
  return 100.0 * (best - baseline) / std::abs(baseline);
}

ConfidenceHistogram confidence_histogram(std::span<const PredictionRecord> records,
                                         std::size_t bins, double low, double high) {
  if (bins < 2) fail(ErrorKind::kContract, "histogram needs at least 2 bins");
  if (!(low < high)) fail(ErrorKind::kContract, "histogram range must satisfy low < high");
  ConfidenceHistogram h;
  const double width = (high - low) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    h.bins.push_back({low + width * static_cast<double>(b),
                      b + 1 == bins ? high : low + width * static_cast<double>(b + 1), 0});
  }
  if (records.empty()) return h;
  h.min = records.front().confidence;
  h.max = records.front().confidence;
  double abs_sum = 0.0;
  for (const auto& r : records) {
    const double v = r.confidence;
    h.min = std::min(h.min, v);
    h.max = std::max(h.max, v);
    abs_sum += std::abs(v);
    const double pos = std::floor((v - low) / width);
    const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
    ++h.bins[idx].count;
  }
  h.mean_abs = abs_sum / static_cast<double>(records.size());
  return h;
}

ConfidenceHistogram confidence_histogram(std::span<const PredictionRecord> records,
                                         std::size_t bins) {
  double extent = 0.0;
  for (const auto& r : records) extent = std::max(extent, std::abs(r.confidence));
  if (extent == 0.0) extent = 1.0;
  return confidence_histogram(records, bins, -extent, extent);
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::kContract, "mean of an empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size() - 1))};
}

MultiRunSummary multi_run_report(std::span<const MetricsReport> runs) {
  if (runs.empty()) fail(ErrorKind::kContract, "multi-run report needs at least one run");
  std::vector<double> acc, m;
  for (const auto& r : runs) {
    acc.push_back(r.acc);
    m.push_back(r.mcc);
  }
  return {runs.size(), mean_std(acc), mean_std(m)};
}

std::string format_mean_std(const MeanStd& value, int precision) {
  return text::format_fixed(value.mean, precision) + "±" + text::format_fixed(value.std, precision);
}

void write_predictions_csv(std::ostream& out, std::span<const PredictionRecord> records) {
  out << "stock,date,label,confidence,predicted\n";
  for (const auto& r : records) {
    out << r.stock_id << ',' << market::format_date(r.anchor_date) << ',' << r.label << ','
        << text::format_double(r.confidence) << ',' << r.predicted << '\n';
  }
}

std::vector<PredictionRecord> read_predictions_csv(std::istream& in, std::string_view source) {
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::trim(line);
    if (row.empty()) continue;
    if (line_no == 1) {
      if (row != "stock,date,label,confidence,predicted") {
        fail(ErrorKind::kParse, std::string(source) + ":1: bad prediction header");
      }
      continue;
    }
    const auto f = text::split(row, ',');
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (f.size() != 5) fail(ErrorKind::kParse, where + ": expected 5 fields");
    const auto date = market::parse_date(f[1]);
    const auto conf = text::parse_double(f[3]);
    if (!date || !conf || (f[2] != "1" && f[2] != "-1") || (f[4] != "1" && f[4] != "-1")) {
      fail(ErrorKind::kParse, where + ": malformed prediction record");
    }
    out.push_back({std::string(f[0]), *date, f[2] == "1" ? 1 : -1, *conf, f[4] == "1" ? 1 : -1});
  }
  return out;
}

void write_histogram_csv(std::ostream& out, const ConfidenceHistogram& histogram) {
  out << "bin_low,bin_high,count\n";
  for (const auto& b : histogram.bins) {
    out << text::format_double(b.low) << ',' << text::format_double(b.high) << ',' << b.count << '\n';
  }
}

}  // namespace advalstm::eval
