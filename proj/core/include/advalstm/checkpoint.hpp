#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "advalstm/params.hpp"

namespace advalstm::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary, little-endian container:
///   "ADVALSTM" | u32 version | u64 D,E,U,E',T | u8 attention | u64 seed
///   | u32 n_meta  { u32 len, key, u32 len, value }
///   | u32 n_tensor { u32 len, name, u32 rank, u64 dim..., f64 value... }
struct Checkpoint {
  ModelDims dims;
  std::uint64_t seed = 0;
  ParamSet params;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace advalstm::nn
