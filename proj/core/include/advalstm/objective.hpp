#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "advalstm/market_data.hpp"
#include "advalstm/params.hpp"
#include "advalstm/tensor.hpp"

namespace advalstm::train {

using market::Example;
using nn::ParamSet;
using nn::Vec;

/// max(0, 1 - y * score); y must be +1 or -1.
double hinge_loss(double y, double score);
/// d hinge / d score: -y inside the margin, 0 at or beyond it.
double hinge_grad(double y, double score);

struct Perturbation {
  Vec repr;       // e + r
  Vec direction;  // r, with ||r||_2 == epsilon
};

/// Fast-gradient perturbation of the representation e. Returns nothing
/// when the hinge is inactive or its gradient vanishes.
std::optional<Perturbation> gen_adversarial(std::span<const double> repr, double y,
                                            const ParamSet& params, double epsilon);

/// e plus a vector drawn uniformly from the sphere of radius epsilon.
Vec gen_random_perturbation(std::span<const double> repr, double epsilon, std::mt19937_64& rng);

struct Objective {
  double loss = 0.0;
  ParamSet grads;
  std::size_t perturbed = 0;  // examples that received a second-branch term
};

/// sum_s l(y, y_hat) * data_scale + alpha/2 * ||params||^2
Objective objective_normal(std::span<const Example> batch, const ParamSet& params, double alpha,
                           double data_scale = 1.0);

/// Clean hinge terms plus beta-weighted hinge terms at e + r for every
/// example with a perturbation. r is a constant of the differentiation.
Objective objective_perturbed(std::span<const Example> batch, const ParamSet& params,
                              double alpha, double beta,
                              std::span<const std::optional<Vec>> perturbations,
                              double data_scale = 1.0);

/// Adversarial objective: perturbations from gen_adversarial at `params`.
Objective objective_adversarial(std::span<const Example> batch, const ParamSet& params,
                                double alpha, double beta, double epsilon,
                                double data_scale = 1.0);

/// Random-perturbation variant: every example gets a fresh sphere draw;
/// example i uses a generator seeded from (stream_seed, i).
Objective objective_random(std::span<const Example> batch, const ParamSet& params, double alpha,
                           double beta, double epsilon, std::uint64_t stream_seed,
                           double data_scale = 1.0);

/// Perturbation vectors r (not e + r) the adversarial objective would use.
std::vector<std::optional<Vec>> adversarial_directions(std::span<const Example> batch,
                                                       const ParamSet& params, double epsilon);

}  // namespace advalstm::train
