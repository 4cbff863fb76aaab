#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "advalstm/tensor.hpp"

namespace advalstm::nn {

/// Model hyperparameters that fix every parameter shape.
struct ModelDims {
  std::size_t features = 11;   // D
  std::size_t mapping = 4;     // E
  std::size_t hidden = 4;      // U
  std::size_t attention = 0;   // E'; 0 means "same as hidden"
  std::size_t lag = 5;         // T
  bool use_attention = true;   // false gives the plain LSTM variant

  std::size_t attention_size() const noexcept {
    return use_attention ? (attention == 0 ? hidden : attention) : 0;
  }
  /// Length of the final representation e.
  std::size_t repr_size() const noexcept { return use_attention ? 2 * hidden : hidden; }

  void validate() const;
  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

enum class ParamId : std::size_t {
  kMapWeight,   // E x D
  kMapBias,     // E
  kGateWeight,  // 4U x (E+U), gate rows ordered input, forget, output, candidate
  kGateBias,    // 4U
  kAttWeight,   // E' x U
  kAttBias,     // E'
  kAttContext,  // E'
  kHeadWeight,  // repr_size
  kHeadBias,    // scalar, shape {1}
};
inline constexpr std::size_t kParamCount = 9;

/// Gate block offsets inside the stacked LSTM weight/bias rows.
enum class Gate : std::size_t { kInput = 0, kForget = 1, kOutput = 2, kCandidate = 3 };

/// All trainable tensors. Gradients and Adam moments use the same type.
class ParamSet {
 public:
  ParamSet() = default;

  static ParamSet zeros(const ModelDims& dims);
  /// Glorot-uniform weights, zero biases, forget-gate bias 1.
  static ParamSet initialize(const ModelDims& dims, std::uint64_t seed);

  const ModelDims& dims() const noexcept { return dims_; }

  Tensor& operator[](ParamId id) { return tensors_[static_cast<std::size_t>(id)]; }
  const Tensor& operator[](ParamId id) const { return tensors_[static_cast<std::size_t>(id)]; }

  std::span<Tensor, kParamCount> tensors() noexcept { return tensors_; }
  std::span<const Tensor, kParamCount> tensors() const noexcept { return tensors_; }

  static std::string_view name(ParamId id);
  static std::string_view name(std::size_t index) { return name(static_cast<ParamId>(index)); }

  /// Squared Frobenius norm over every tensor.
  double squared_norm() const;
  /// this += scale * other
  void add_scaled(const ParamSet& other, double scale);
  void scale(double factor);
  void set_zero();
  std::size_t scalar_count() const;
  bool same_shape(const ParamSet& other) const;
  void check_same_shape(const ParamSet& other, std::string_view context) const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  explicit ParamSet(const ModelDims& dims);

  ModelDims dims_{};
  std::array<Tensor, kParamCount> tensors_{};
};

}  // namespace advalstm::nn
