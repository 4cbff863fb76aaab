#include "advalstm/params.hpp"

#include <cmath>
#include <random>
#include <string>

#include "advalstm/error.hpp"

namespace advalstm::nn {

void ModelDims::validate() const {
  if (features == 0 || mapping == 0 || hidden == 0 || lag == 0) {
    fail(ErrorKind::kContract, "model dimensions D, E, U and T must be positive");
  }
}

ParamSet::ParamSet(const ModelDims& dims) : dims_(dims) {
  dims.validate();
  const std::size_t D = dims.features;
  const std::size_t E = dims.mapping;
  const std::size_t U = dims.hidden;
  const std::size_t A = dims.attention_size();
  (*this)[ParamId::kMapWeight] = Tensor({E, D});
  (*this)[ParamId::kMapBias] = Tensor({E});
  (*this)[ParamId::kGateWeight] = Tensor({4 * U, E + U});
  (*this)[ParamId::kGateBias] = Tensor({4 * U});
  (*this)[ParamId::kAttWeight] = Tensor({A, U});
  (*this)[ParamId::kAttBias] = Tensor({A});
  (*this)[ParamId::kAttContext] = Tensor({A});
  (*this)[ParamId::kHeadWeight] = Tensor({dims.repr_size()});
  (*this)[ParamId::kHeadBias] = Tensor({1});
}

ParamSet ParamSet::zeros(const ModelDims& dims) { return ParamSet(dims); }

ParamSet ParamSet::initialize(const ModelDims& dims, std::uint64_t seed) {
  ParamSet p(dims);
  std::mt19937_64 rng(seed);
  auto glorot = [&rng](Tensor& t, std::size_t fan_in, std::size_t fan_out) {
    const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-r, r);
    for (double& v : t.data()) v = dist(rng);
  };
  const std::size_t E = dims.mapping;
  const std::size_t U = dims.hidden;
  const std::size_t A = dims.attention_size();
  glorot(p[ParamId::kMapWeight], dims.features, E);
  glorot(p[ParamId::kGateWeight], E + U, U);
  if (A > 0) {
    glorot(p[ParamId::kAttWeight], U, A);
    glorot(p[ParamId::kAttContext], A, 1);
  }
  glorot(p[ParamId::kHeadWeight], dims.repr_size(), 1);
  auto& gate_bias = p[ParamId::kGateBias];
  for (std::size_t j = 0; j < U; ++j) gate_bias[static_cast<std::size_t>(Gate::kForget) * U + j] = 1.0;
  return p;
}

std::string_view ParamSet::name(ParamId id) {
  switch (id) {
    case ParamId::kMapWeight: return "map.weight";
    case ParamId::kMapBias: return "map.bias";
    case ParamId::kGateWeight: return "lstm.weight";
    case ParamId::kGateBias: return "lstm.bias";
    case ParamId::kAttWeight: return "attention.weight";
    case ParamId::kAttBias: return "attention.bias";
    case ParamId::kAttContext: return "attention.context";
    case ParamId::kHeadWeight: return "head.weight";
    case ParamId::kHeadBias: return "head.bias";
  }
  return "?";
}

double ParamSet::squared_norm() const {
  double sum = 0.0;
  for (const auto& t : tensors_) sum += nn::squared_norm(t.data());
  return sum;
}

void ParamSet::add_scaled(const ParamSet& other, double scale) {
  check_same_shape(other, "add_scaled");
  for (std::size_t k = 0; k < kParamCount; ++k) {
    auto dst = tensors_[k].data();
    auto src = other.tensors_[k].data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
  }
}

void ParamSet::scale(double factor) {
  for (auto& t : tensors_) {
    for (double& v : t.data()) v *= factor;
  }
}

void ParamSet::set_zero() {
  for (auto& t : tensors_) t.fill(0.0);
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

bool ParamSet::same_shape(const ParamSet& other) const {
  for (std::size_t k = 0; k < kParamCount; ++k) {
    if (!tensors_[k].same_shape(other.tensors_[k])) return false;
  }
  return true;
}

void ParamSet::check_same_shape(const ParamSet& other, std::string_view context) const {
  if (!same_shape(other)) {
    fail(ErrorKind::kShape, std::string(context) + ": parameter sets have different shapes");
  }
}

}  // namespace advalstm::nn
