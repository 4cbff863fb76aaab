#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace advalstm::market {

using Date = std::chrono::year_month_day;

/// Parses a strict `YYYY-MM-DD` calendar date.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);

/// One trading day of raw prices for one stock.
struct EodRecord {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double adj_close = 0.0;
  double volume = 0.0;
};

struct StockSeries {
  std::string stock_id;
  std::vector<EodRecord> records;  // strictly date-ascending
};

/// Series keyed by stock, ordered by stock id.
using SeriesSet = std::vector<StockSeries>;

struct IngestResult {
  SeriesSet series;
  std::vector<std::string> warnings;
};

/// Reads the `stock,date,open,high,low,close,adj_close,volume` CSV
/// format. `source` names the stream in error messages.
IngestResult ingest_eod(std::istream& in, std::string_view source);
IngestResult ingest_eod(const std::filesystem::path& path);
/// Merges several files (one per stock or combined); a (stock, date)
/// pair repeated across files is rejected like one repeated in a file.
IngestResult ingest_eod(std::span<const std::filesystem::path> paths);

struct AlignedSeries {
  std::vector<Date> calendar;
  SeriesSet series;  // every series has exactly `calendar` as its dates
};

/// Restricts every stock to the dates present in all of them.
AlignedSeries align_trading_days(const SeriesSet& series);

struct CoverageFilter {
  SeriesSet kept;
  std::vector<std::string> dropped;
};

/// Drops stocks whose day count is below `min_ratio` of the union of all
/// trading days, so one sparse symbol cannot shrink the common calendar.
CoverageFilter filter_by_coverage(const SeriesSet& series, double min_ratio);

// ---------------------------------------------------------------------------
// Features

inline constexpr std::size_t kFeatureCount = 11;
/// Aligned days needed up to and including t (longest moving average).
inline constexpr std::size_t kFeatureHistory = 30;
inline constexpr std::array<std::size_t, 6> kMovingAverageDays{5, 10, 15, 20, 25, 30};

using FeatureVector = std::array<double, kFeatureCount>;

std::span<const std::string_view> feature_names();

/// Daily trend features at index `t`, in the order c_open, c_high, c_low,
/// n_close, n_adj_close, then the 5..30-day moving-average ratios.
FeatureVector compute_features(std::span<const EodRecord> series, std::size_t t);

// ---------------------------------------------------------------------------
// Examples and splits

struct SplitSpec {
  Date train_end;
  Date val_end;
  Date test_end;
  std::size_t lag = 5;
  double pos_threshold = 0.55;  // percent
  double neg_threshold = -0.5;  // percent

  void validate() const;
};

struct Example {
  std::string stock_id;
  Date anchor_date;
  std::vector<FeatureVector> window;  // oldest first, length == lag
  int label = 0;                      // +1 / -1
  double movement_percent = 0.0;
};

enum class Split { kTrain, kValidation, kTest };
std::string_view to_string(Split split);

struct SplitDataset {
  std::vector<Example> train;
  std::vector<Example> validation;
  std::vector<Example> test;
  std::vector<std::string> warnings;

  const std::vector<Example>& operator[](Split split) const;
  std::size_t size() const { return train.size() + validation.size() + test.size(); }
};

/// Features for every day with enough history, plus the adjusted closes
/// needed for labels and indicator baselines. Windows for any lag are
/// materialized from this table.
struct StockFeatures {
  std::string stock_id;
  std::vector<Date> dates;
  std::vector<double> adj_close;
  /// features[i] belongs to dates[i + kFeatureHistory - 1].
  std::vector<FeatureVector> features;

  std::size_t first_feature_day() const { return kFeatureHistory - 1; }
  const FeatureVector& features_at(std::size_t day) const {
    return features[day - first_feature_day()];
  }
  std::optional<std::size_t> day_index(const Date& date) const;
};

using FeatureTable = std::vector<StockFeatures>;

FeatureTable build_feature_table(const AlignedSeries& aligned);

/// Movement percent from the adjusted close on `day` to the next day.
double movement_percent(std::span<const double> adj_close, std::size_t day);

/// Labels every lag window, discards movements strictly between the
/// thresholds and assigns survivors to splits by anchor date.
SplitDataset make_examples(const FeatureTable& table, const SplitSpec& spec);
SplitDataset label_and_window(const AlignedSeries& aligned, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Dataset container

/// Versioned, deterministic text container: split spec, the per-day
/// feature table and an index of the examples at the stored lag.
struct Dataset {
  SplitSpec spec;
  FeatureTable table;
  std::vector<std::string> dropped_stocks;

  SplitDataset examples() const { return make_examples(table, spec); }
  SplitDataset examples(std::size_t lag) const;
};

void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in, std::string_view source);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace advalstm::market
