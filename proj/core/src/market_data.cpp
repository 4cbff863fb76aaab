#include "advalstm/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "advalstm/error.hpp"
#include "advalstm/text.hpp"

namespace advalstm::market {

namespace {

constexpr std::string_view kCsvHeader = "stock,date,open,high,low,close,adj_close,volume";
constexpr std::string_view kDatasetMagic = "advalstm-dataset v1";

std::optional<int> parse_digits(std::string_view text) {
  int value = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') return std::nullopt;
    value = value * 10 + (ch - '0');
  }
  return value;
}

struct Located {
  EodRecord record;
  std::string location;
};

class SeriesAccumulator {
 public:
  void add(const std::string& stock, const EodRecord& record, std::string location) {
    rows_[stock].push_back({record, std::move(location)});
  }

  SeriesSet finish() {
    SeriesSet out;
    out.reserve(rows_.size());
    for (auto& [stock, rows] : rows_) {
      std::stable_sort(rows.begin(), rows.end(), [](const Located& a, const Located& b) {
        return a.record.date < b.record.date;
      });
      StockSeries series{stock, {}};
      series.records.reserve(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].record.date == rows[i - 1].record.date) {
          fail(ErrorKind::kData, rows[i].location + ": duplicate date " +
                                     format_date(rows[i].record.date) + " for stock " +
                                     stock + " (first seen at " + rows[i - 1].location + ")");
        }
        series.records.push_back(rows[i].record);
      }
      out.push_back(std::move(series));
    }
    return out;
  }

 private:
  std::map<std::string, std::vector<Located>> rows_;
};

void ingest_stream(std::istream& in, std::string_view source, SeriesAccumulator& acc,
                   std::vector<std::string>& warnings) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::trim(line);
    if (row.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (!seen_header) {
      if (row != kCsvHeader) {
        fail(ErrorKind::kParse, where + ": expected header '" + std::string(kCsvHeader) + "'");
      }
      seen_header = true;
      continue;
    }
    const auto fields = text::split(row, ',');
    if (fields.size() != 8) {
      fail(ErrorKind::kParse, where + ": expected 8 fields, got " + std::to_string(fields.size()));
    }
    const auto stock = text::trim(fields[0]);
    if (stock.empty()) fail(ErrorKind::kParse, where + ": empty stock id");
    const auto date = parse_date(text::trim(fields[1]));
    if (!date) fail(ErrorKind::kParse, where + ": bad date '" + std::string(fields[1]) + "'");

    static constexpr std::array<std::string_view, 6> kNames{"open",  "high",      "low",
                                                            "close", "adj_close", "volume"};
    std::array<double, 6> values{};
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto value = text::parse_double(fields[i + 2]);
      if (!value || !std::isfinite(*value)) {
        fail(ErrorKind::kParse, where + ": bad " + std::string(kNames[i]) + " '" +
                                    std::string(fields[i + 2]) + "'");
      }
      values[i] = *value;
    }
    for (std::size_t i = 0; i < 5; ++i) {
      if (values[i] <= 0.0) {
        fail(ErrorKind::kData, where + ": non-positive " + std::string(kNames[i]) + " " +
                                   text::format_double(values[i]));
      }
    }
    if (values[5] < 0.0) fail(ErrorKind::kData, where + ": negative volume");

    const EodRecord record{*date, values[0], values[1], values[2], values[3], values[4], values[5]};
    if (record.low > std::min(record.open, record.close) ||
        record.high < std::max(record.open, record.close)) {
      warnings.push_back(where + ": high/low range does not contain open/close");
    }
    acc.add(std::string(stock), record, where);
  }
  if (!seen_header) fail(ErrorKind::kParse, std::string(source) + ": missing header");
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = parse_digits(text.substr(0, 4));
  const auto m = parse_digits(text.substr(5, 2));
  const auto d = parse_digits(text.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

IngestResult ingest_eod(std::istream& in, std::string_view source) {
  SeriesAccumulator acc;
  IngestResult result;
  ingest_stream(in, source, acc, result.warnings);
  result.series = acc.finish();
  return result;
}

IngestResult ingest_eod(const std::filesystem::path& path) {
  return ingest_eod(std::span<const std::filesystem::path>(&path, 1));
}

IngestResult ingest_eod(std::span<const std::filesystem::path> paths) {
  SeriesAccumulator acc;
  IngestResult result;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
    ingest_stream(in, path.string(), acc, result.warnings);
  }
  result.series = acc.finish();
  return result;
}

AlignedSeries align_trading_days(const SeriesSet& series) {
  if (series.empty()) fail(ErrorKind::kContract, "align_trading_days needs at least one stock");
  std::vector<Date> common;
  for (const auto& r : series.front().records) common.push_back(r.date);
  for (std::size_t s = 1; s < series.size(); ++s) {
    std::vector<Date> dates;
    for (const auto& r : series[s].records) dates.push_back(r.date);
    std::vector<Date> next;
    std::set_intersection(common.begin(), common.end(), dates.begin(), dates.end(),
                          std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) fail(ErrorKind::kAlignment, "no trading day is shared by every stock");

  AlignedSeries aligned{common, {}};
  for (const auto& s : series) {
    StockSeries restricted{s.stock_id, {}};
    restricted.records.reserve(common.size());
    auto it = common.begin();
    for (const auto& r : s.records) {
      while (it != common.end() && *it < r.date) ++it;
      if (it != common.end() && *it == r.date) restricted.records.push_back(r);
    }
    aligned.series.push_back(std::move(restricted));
  }
  return aligned;
}

CoverageFilter filter_by_coverage(const SeriesSet& series, double min_ratio) {
  if (!(min_ratio >= 0.0 && min_ratio <= 1.0)) {
    fail(ErrorKind::kContract, "min_coverage must lie in [0, 1]");
  }
  std::set<Date> all_days;
  for (const auto& s : series) {
    for (const auto& r : s.records) all_days.insert(r.date);
  }
  CoverageFilter out;
  const double total = static_cast<double>(all_days.size());
  for (const auto& s : series) {
    if (static_cast<double>(s.records.size()) >= min_ratio * total) {
      out.kept.push_back(s);
    } else {
      out.dropped.push_back(s.stock_id);
    }
  }
  return out;
}

std::span<const std::string_view> feature_names() {
  static constexpr std::array<std::string_view, kFeatureCount> kNames{
      "c_open", "c_high", "c_low",  "n_close", "n_adj_close", "5-day",
      "10-day", "15-day", "20-day", "25-day",  "30-day"};
  return kNames;
}

FeatureVector compute_features(std::span<const EodRecord> series, std::size_t t) {
  if (t >= series.size()) {
    fail(ErrorKind::kWindow, "day index " + std::to_string(t) + " beyond series of length " +
                                 std::to_string(series.size()));
  }
  if (t + 1 < kFeatureHistory) {
    fail(ErrorKind::kWindow, "features at day " + std::to_string(t) + " need " +
                                 std::to_string(kFeatureHistory) + " days of history");
  }
  const EodRecord& day = series[t];
  const EodRecord& prev = series[t - 1];
  FeatureVector f{};
  f[0] = day.open / day.close - 1.0;
  f[1] = day.high / day.close - 1.0;
  f[2] = day.low / day.close - 1.0;
  f[3] = day.close / prev.close - 1.0;
  f[4] = day.adj_close / prev.adj_close - 1.0;
  for (std::size_t j = 0; j < kMovingAverageDays.size(); ++j) {
    const std::size_t k = kMovingAverageDays[j];
    // Mean of ratios rather than ratio of mean: identical in exact
    // arithmetic and exactly zero on constant prices.
    double ratio_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) ratio_sum += series[t - i].adj_close / day.adj_close;
    f[5 + j] = ratio_sum / static_cast<double>(k) - 1.0;
  }
  for (double v : f) {
    if (!std::isfinite(v)) fail(ErrorKind::kNumeric, "non-finite feature at day " + std::to_string(t));
  }
  return f;
}

void SplitSpec::validate() const {
  if (!train_end.ok() || !val_end.ok() || !test_end.ok()) {
    fail(ErrorKind::kContract, "split boundaries must be valid dates");
  }
  if (!(train_end < val_end && val_end < test_end)) {
    fail(ErrorKind::kContract, "split boundaries must satisfy train_end < val_end < test_end");
  }
  if (lag < 1) fail(ErrorKind::kContract, "lag must be positive");
  if (!(pos_threshold > 0.0 && neg_threshold < 0.0)) {
    fail(ErrorKind::kContract, "thresholds must satisfy pos_threshold > 0 > neg_threshold");
  }
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "?";
}

const std::vector<Example>& SplitDataset::operator[](Split split) const {
  switch (split) {
    case Split::kTrain: return train;
    case Split::kValidation: return validation;
    case Split::kTest: return test;
  }
  return test;
}

std::optional<std::size_t> StockFeatures::day_index(const Date& date) const {
  const auto it = std::lower_bound(dates.begin(), dates.end(), date);
  if (it == dates.end() || *it != date) return std::nullopt;
  return static_cast<std::size_t>(it - dates.begin());
}

FeatureTable build_feature_table(const AlignedSeries& aligned) {
  FeatureTable table;
  table.reserve(aligned.series.size());
  for (const auto& s : aligned.series) {
    StockFeatures sf{s.stock_id, {}, {}, {}};
    for (const auto& r : s.records) {
      sf.dates.push_back(r.date);
      sf.adj_close.push_back(r.adj_close);
    }
    for (std::size_t t = kFeatureHistory - 1; t < s.records.size(); ++t) {
      sf.features.push_back(compute_features(s.records, t));
    }
    table.push_back(std::move(sf));
  }
  return table;
}

double movement_percent(std::span<const double> adj_close, std::size_t day) {
  if (day + 1 >= adj_close.size()) {
    fail(ErrorKind::kWindow, "movement at day " + std::to_string(day) + " needs the next day");
  }
  return 100.0 * (adj_close[day + 1] / adj_close[day] - 1.0);
}

SplitDataset make_examples(const FeatureTable& table, const SplitSpec& spec) {
  spec.validate();
  SplitDataset out;
  for (const auto& stock : table) {
    const std::size_t first_anchor = kFeatureHistory - 1 + spec.lag - 1;
    for (std::size_t day = first_anchor; day + 1 < stock.dates.size(); ++day) {
      const Date& anchor = stock.dates[day];
      std::vector<Example>* bucket = nullptr;
      if (anchor < spec.train_end) {
        bucket = &out.train;
      } else if (anchor < spec.val_end) {
        bucket = &out.validation;
      } else if (anchor < spec.test_end) {
        bucket = &out.test;
      } else {
        break;
      }
      const double movement = movement_percent(stock.adj_close, day);
      int label = 0;
      if (movement >= spec.pos_threshold) {
        label = 1;
      } else if (movement <= spec.neg_threshold) {
        label = -1;
      } else {
        continue;
      }
      Example ex{stock.stock_id, anchor, {}, label, movement};
      ex.window.reserve(spec.lag);
      for (std::size_t d = day + 1 - spec.lag; d <= day; ++d) ex.window.push_back(stock.features_at(d));
      bucket->push_back(std::move(ex));
    }
  }
  for (Split split : {Split::kTrain, Split::kValidation, Split::kTest}) {
    if (out[split].empty()) {
      out.warnings.push_back("no retained examples in the " + std::string(to_string(split)) +
                             " split");
    }
  }
  return out;
}

SplitDataset label_and_window(const AlignedSeries& aligned, const SplitSpec& spec) {
  return make_examples(build_feature_table(aligned), spec);
}

SplitDataset Dataset::examples(std::size_t lag) const {
  SplitSpec s = spec;
  s.lag = lag;
  return make_examples(table, s);
}

// ---------------------------------------------------------------------------
// Dataset container

void write_dataset(std::ostream& out, const Dataset& dataset) {
  const auto& spec = dataset.spec;
  out << kDatasetMagic << '\n';
  out << "train_end," << format_date(spec.train_end) << '\n';
  out << "val_end," << format_date(spec.val_end) << '\n';
  out << "test_end," << format_date(spec.test_end) << '\n';
  out << "lag," << spec.lag << '\n';
  out << "pos_threshold," << text::format_double(spec.pos_threshold) << '\n';
  out << "neg_threshold," << text::format_double(spec.neg_threshold) << '\n';
  out << "dropped";
  for (const auto& id : dataset.dropped_stocks) out << ',' << id;
  out << '\n';
  out << "stocks," << dataset.table.size() << '\n';
  for (const auto& stock : dataset.table) {
    out << "stock," << stock.stock_id << ',' << stock.dates.size() << '\n';
    for (std::size_t d = 0; d < stock.dates.size(); ++d) {
      out << "day," << format_date(stock.dates[d]) << ',' << text::format_double(stock.adj_close[d]);
      if (d >= stock.first_feature_day()) {
        for (double v : stock.features_at(d)) out << ',' << text::format_double(v);
      }
      out << '\n';
    }
  }
  const SplitDataset examples = dataset.examples();
  out << "examples," << examples.size() << '\n';
  for (Split split : {Split::kTrain, Split::kValidation, Split::kTest}) {
    for (const auto& ex : examples[split]) {
      out << "example," << to_string(split) << ',' << ex.stock_id << ','
          << format_date(ex.anchor_date) << ',' << ex.label << ','
          << text::format_double(ex.movement_percent) << '\n';
    }
  }
  out << "end\n";
}

namespace {

class LineReader {
 public:
  LineReader(std::istream& in, std::string_view source) : in_(in), source_(source) {}

  std::vector<std::string> fields(std::string_view expected_tag) {
    std::string line;
    if (!std::getline(in_, line)) {
      fail(ErrorKind::kParse, where() + ": unexpected end of dataset, wanted '" +
                                  std::string(expected_tag) + "'");
    }
    ++line_no_;
    std::vector<std::string> out;
    for (auto f : text::split(text::trim(line), ',')) out.emplace_back(f);
    if (out.empty() || out[0] != expected_tag) {
      fail(ErrorKind::kParse, where() + ": expected '" + std::string(expected_tag) + "' record");
    }
    return out;
  }

  std::string raw() {
    std::string line;
    if (!std::getline(in_, line)) fail(ErrorKind::kParse, where() + ": empty dataset");
    ++line_no_;
    return std::string(text::trim(line));
  }

  std::string where() const { return source_ + ":" + std::to_string(line_no_); }

  Date date(const std::string& field) const {
    auto d = parse_date(field);
    if (!d) fail(ErrorKind::kParse, where() + ": bad date '" + field + "'");
    return *d;
  }
  double number(const std::string& field) const {
    auto v = text::parse_double(field);
    if (!v) fail(ErrorKind::kParse, where() + ": bad number '" + field + "'");
    return *v;
  }
  std::size_t count(const std::string& field) const {
    auto v = text::parse_uint(field);
    if (!v) fail(ErrorKind::kParse, where() + ": bad count '" + field + "'");
    return static_cast<std::size_t>(*v);
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

std::string single(LineReader& reader, std::string_view tag) {
  auto f = reader.fields(tag);
  if (f.size() != 2) fail(ErrorKind::kParse, reader.where() + ": malformed '" + std::string(tag) + "'");
  return f[1];
}

}  // namespace

Dataset read_dataset(std::istream& in, std::string_view source) {
  LineReader reader(in, source);
  if (reader.raw() != kDatasetMagic) {
    fail(ErrorKind::kParse, std::string(source) + ": not an advalstm-dataset v1 file");
  }
  Dataset ds;
  ds.spec.train_end = reader.date(single(reader, "train_end"));
  ds.spec.val_end = reader.date(single(reader, "val_end"));
  ds.spec.test_end = reader.date(single(reader, "test_end"));
  ds.spec.lag = reader.count(single(reader, "lag"));
  ds.spec.pos_threshold = reader.number(single(reader, "pos_threshold"));
  ds.spec.neg_threshold = reader.number(single(reader, "neg_threshold"));
  auto dropped = reader.fields("dropped");
  ds.dropped_stocks.assign(dropped.begin() + 1, dropped.end());
  const std::size_t n_stocks = reader.count(single(reader, "stocks"));
  for (std::size_t s = 0; s < n_stocks; ++s) {
    auto header = reader.fields("stock");
    if (header.size() != 3) fail(ErrorKind::kParse, reader.where() + ": malformed stock record");
    StockFeatures sf{header[1], {}, {}, {}};
    const std::size_t n_days = reader.count(header[2]);
    for (std::size_t d = 0; d < n_days; ++d) {
      auto row = reader.fields("day");
      const bool has_features = d + 1 >= kFeatureHistory;
      const std::size_t expected = 3 + (has_features ? kFeatureCount : 0);
      if (row.size() != expected) {
        fail(ErrorKind::kParse, reader.where() + ": expected " + std::to_string(expected) + " fields");
      }
      sf.dates.push_back(reader.date(row[1]));
      sf.adj_close.push_back(reader.number(row[2]));
      if (has_features) {
        FeatureVector f{};
        for (std::size_t i = 0; i < kFeatureCount; ++i) f[i] = reader.number(row[3 + i]);
        sf.features.push_back(f);
      }
    }
    ds.table.push_back(std::move(sf));
  }
  ds.spec.validate();
  const std::size_t n_examples = reader.count(single(reader, "examples"));
  for (std::size_t i = 0; i < n_examples; ++i) reader.fields("example");
  reader.fields("end");
  if (ds.examples().size() != n_examples) {
    fail(ErrorKind::kMismatch, std::string(source) + ": example index disagrees with feature table");
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  write_dataset(out, dataset);
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open dataset " + path.string());
  return read_dataset(in, path.string());
}

}  // namespace advalstm::market
