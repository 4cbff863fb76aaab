#include "fixtures.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "advalstm/text.hpp"

namespace advalstm::fx {

std::vector<market::EodRecord> random_walk(market::Date start,
                                           std::size_t days, std::uint64_t seed, double daily_vol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> step(0.0, daily_vol);
  std::uniform_real_distribution<double> spread(0.0, 0.01);
  std::vector<market::EodRecord> rows;
  std::chrono::sys_days day = start;
  double close = 50.0;
  while (rows.size() < days) {
    const std::chrono::weekday wd{day};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) {
      const double open = close;
      close = open * std::exp(step(rng));
      market::EodRecord r;
      r.date = market::Date{day};
      r.open = open;
      r.close = close;
      r.high = std::max(open, close) * (1.0 + spread(rng));
      r.low = std::min(open, close) * (1.0 - spread(rng));
      r.adj_close = close * 0.98;
      r.volume = 1.0e6 + static_cast<double>(rows.size());
      rows.push_back(r);
    }
    day += std::chrono::days{1};
  }
  return rows;
}

std::string to_csv(const std::vector<market::EodRecord>& rows, const std::string& stock) {
  std::string out = "stock,date,open,high,low,close,adj_close,volume\n";
  for (const auto& r : rows) {
    out += stock + ',' + market::format_date(r.date) + ',' + text::format_double(r.open) + ',' +
           text::format_double(r.high) + ',' + text::format_double(r.low) + ',' +
           text::format_double(r.close) + ',' + text::format_double(r.adj_close) + ',' +
           text::format_double(r.volume) + '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const std::string& stock,
               const std::vector<market::EodRecord>& rows) {
  std::ofstream out(path, std::ios::binary);
  out << to_csv(rows, stock);
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("advalstm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace advalstm::fx
