#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "advalstm/market_data.hpp"

namespace advalstm::fx {

/// Business-day random-walk EOD rows for one stock.
std::vector<market::EodRecord> random_walk(market::Date start,
                                           std::size_t days, std::uint64_t seed,
                                           double daily_vol = 0.015);

/// The ingest CSV rendering of `rows`, header included.
std::string to_csv(const std::vector<market::EodRecord>& rows, const std::string& stock);

void write_csv(const std::filesystem::path& path, const std::string& stock,
               const std::vector<market::EodRecord>& rows);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace advalstm::fx
