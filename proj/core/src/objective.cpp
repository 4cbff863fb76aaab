#include "advalstm/objective.hpp"

#include <cmath>
#include <string>

#include "advalstm/error.hpp"
#include "advalstm/layers.hpp"
#include "parallel.hpp"

namespace advalstm::train {

namespace {

constexpr std::size_t kChunk = 32;

void check_label(double y) {
  if (y != 1.0 && y != -1.0) fail(ErrorKind::kContract, "label must be +1 or -1");
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct Partial {
  double loss = 0.0;
  ParamSet grads;
  std::size_t perturbed = 0;
};

}  // namespace

double hinge_loss(double y, double score) {
  check_label(y);
  return std::max(0.0, 1.0 - y * score);
}

double hinge_grad(double y, double score) {
  check_label(y);
  return y * score < 1.0 ? -y : 0.0;
}

std::optional<Perturbation> gen_adversarial(std::span<const double> repr, double y,
                                            const ParamSet& params, double epsilon) {
  if (!(epsilon >= 0.0)) fail(ErrorKind::kContract, "epsilon must be non-negative");
  const double slope = hinge_grad(y, nn::head_score(repr, params));
  if (slope == 0.0) return std::nullopt;
  const auto w = params[nn::ParamId::kHeadWeight].data();
  Vec g(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) g[k] = slope * w[k];
  const double norm = std::sqrt(nn::squared_norm(g));
  if (norm < 1e-12) return std::nullopt;

  Perturbation p{Vec(repr.begin(), repr.end()), Vec(g.size(), 0.0)};
  if (epsilon == 0.0) return p;
  for (std::size_t k = 0; k < g.size(); ++k) {
    p.direction[k] = epsilon * g[k] / norm;
    p.repr[k] += p.direction[k];
  }
  return p;
}

Vec gen_random_perturbation(std::span<const double> repr, double epsilon, std::mt19937_64& rng) {
  if (!(epsilon >= 0.0)) fail(ErrorKind::kContract, "epsilon must be non-negative");
  Vec out(repr.begin(), repr.end());
  if (epsilon == 0.0 || repr.empty()) return out;
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec r(repr.size());
  double norm = 0.0;
  do {
    for (double& v : r) v = normal(rng);
    norm = std::sqrt(nn::squared_norm(r));
  } while (norm == 0.0);
  for (std::size_t k = 0; k < r.size(); ++k) out[k] += epsilon * r[k] / norm;
  return out;
}

Objective objective_perturbed(std::span<const Example> batch, const ParamSet& params,
                              double alpha, double beta,
                              std::span<const std::optional<Vec>> perturbations,
                              double data_scale) {
  if (batch.empty()) fail(ErrorKind::kContract, "objective over an empty batch");
  if (!(alpha >= 0.0 && beta >= 0.0)) fail(ErrorKind::kContract, "alpha and beta must be >= 0");
  if (!perturbations.empty() && perturbations.size() != batch.size()) {
    fail(ErrorKind::kShape, "one perturbation slot per example required");
  }
  const bool second_branch = beta != 0.0 && !perturbations.empty();

  const std::size_t n_chunks = (batch.size() + kChunk - 1) / kChunk;
  std::vector<Partial> partials(n_chunks);
  detail::for_each_chunk(n_chunks, [&](std::size_t c) {
    Partial& part = partials[c];
    part.grads = ParamSet::zeros(params.dims());
    const std::size_t end = std::min(batch.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const Example& ex = batch[i];
      const double y = ex.label;
      const nn::ForwardTrace trace = nn::forward(params, ex.window);
      part.loss += data_scale * hinge_loss(y, trace.score);
      const double upstream = data_scale * hinge_grad(y, trace.score);

      std::optional<nn::HeadInjection> injection;
      Vec shifted;
      if (second_branch && perturbations[i]) {
        const Vec& r = *perturbations[i];
        if (r.size() != trace.repr.size()) fail(ErrorKind::kShape, "perturbation length != |e|");
        shifted = trace.repr;
        for (std::size_t k = 0; k < r.size(); ++k) shifted[k] += r[k];
        const double shifted_score = nn::head_score(shifted, params);
        part.loss += data_scale * beta * hinge_loss(y, shifted_score);
        injection = nn::HeadInjection{shifted, data_scale * beta * hinge_grad(y, shifted_score)};
        ++part.perturbed;
      }
      if (upstream != 0.0 || (injection && injection->upstream != 0.0)) {
        nn::backward(params, trace, upstream, part.grads, injection);
      }
    }
  });

  Objective out{0.0, ParamSet::zeros(params.dims()), 0};
  for (const Partial& part : partials) {
    out.loss += part.loss;
    out.grads.add_scaled(part.grads, 1.0);
    out.perturbed += part.perturbed;
  }
  out.loss += 0.5 * alpha * params.squared_norm();
  out.grads.add_scaled(params, alpha);
  if (!std::isfinite(out.loss)) fail(ErrorKind::kNumeric, "objective is not finite");
  return out;
}

Objective objective_normal(std::span<const Example> batch, const ParamSet& params, double alpha,
                           double data_scale) {
  return objective_perturbed(batch, params, alpha, 0.0, {}, data_scale);
}

std::vector<std::optional<Vec>> adversarial_directions(std::span<const Example> batch,
                                                       const ParamSet& params, double epsilon) {
  std::vector<std::optional<Vec>> out(batch.size());
  const std::size_t n_chunks = (batch.size() + kChunk - 1) / kChunk;
  detail::for_each_chunk(n_chunks, [&](std::size_t c) {
    const std::size_t end = std::min(batch.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const nn::ForwardTrace trace = nn::forward(params, batch[i].window);
      if (auto p = gen_adversarial(trace.repr, batch[i].label, params, epsilon)) {
        out[i] = std::move(p->direction);
      }
    }
  });
  return out;
}

Objective objective_adversarial(std::span<const Example> batch, const ParamSet& params,
                                double alpha, double beta, double epsilon, double data_scale) {
  if (!(epsilon >= 0.0)) fail(ErrorKind::kContract, "epsilon must be non-negative");
  if (beta == 0.0) return objective_normal(batch, params, alpha, data_scale);
  const auto directions = adversarial_directions(batch, params, epsilon);
  return objective_perturbed(batch, params, alpha, beta, directions, data_scale);
}

Objective objective_random(std::span<const Example> batch, const ParamSet& params, double alpha,
                           double beta, double epsilon, std::uint64_t stream_seed,
                           double data_scale) {
  if (!(epsilon >= 0.0)) fail(ErrorKind::kContract, "epsilon must be non-negative");
  if (beta == 0.0) return objective_normal(batch, params, alpha, data_scale);
  const std::size_t dim = params.dims().repr_size();
  const Vec origin(dim, 0.0);
  std::vector<std::optional<Vec>> directions(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::mt19937_64 rng(mix(stream_seed, i));
    directions[i] = gen_random_perturbation(origin, epsilon, rng);
  }
  return objective_perturbed(batch, params, alpha, beta, directions, data_scale);
}

}  // namespace advalstm::train
