#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advalstm/baselines.hpp"
#include "advalstm/grid_search.hpp"
#include "advalstm/market_data.hpp"
#include "advalstm/params.hpp"
#include "advalstm/trainer.hpp"

namespace advalstm::cli {

/// Everything one experiment needs. Read from a flat `key = value` file;
/// see README for the key list.
struct RunConfig {
  std::vector<std::filesystem::path> data;
  market::SplitSpec split;
  double min_coverage = 0.98;
  nn::ModelDims dims;
  train::TrainConfig train;
  std::optional<double> attack_epsilon;
  baselines::IndicatorConfig indicators;
  std::filesystem::path out = "out";
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t histogram_bins = 20;
  train::GridSpec grid = train::GridSpec::standard();

  RunConfig();

  /// Rejects every downstream precondition violation up front.
  void validate() const;
  /// Model dims with the lag taken from the split spec.
  nn::ModelDims model_dims() const;
  double effective_attack_epsilon() const { return attack_epsilon.value_or(train.epsilon); }
};

/// `base_dir` resolves relative data paths.
RunConfig parse_config(std::istream& in, std::string_view source,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Canonical rendering: every key, fixed order, shortest round-trip numbers.
std::string to_text(const RunConfig& config);
/// Canonical text without the output location, which does not change results.
std::string experiment_text(const RunConfig& config);
/// Git-style hash of the experiment text.
std::string config_hash(const RunConfig& config);

}  // namespace advalstm::cli
