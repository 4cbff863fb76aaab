#pragma once

#include <optional>
#include <span>
#include <vector>

#include "advalstm/market_data.hpp"
#include "advalstm/params.hpp"
#include "advalstm/tensor.hpp"

namespace advalstm::nn {

struct LstmStep {
  Vec input_gate;
  Vec forget_gate;
  Vec output_gate;
  Vec candidate;
  Vec cell;
  Vec cell_tanh;
  Vec hidden;
};

struct AttentionTrace {
  std::vector<Vec> projected;  // tanh(W_a h_t + b_a)
  Vec logits;
  Vec weights;  // softmax(logits)
  Vec aggregate;
};

struct HeadOutput {
  Vec repr;
  double score = 0.0;
};

/// Every activation of one forward pass, enough to run the exact reverse
/// pass without recomputation.
struct ForwardTrace {
  std::vector<Vec> inputs;
  std::vector<Vec> mapped;
  std::vector<LstmStep> lstm;
  AttentionTrace attention;  // empty when attention is disabled
  Vec repr;                  // e
  double score = 0.0;        // y_hat

  std::span<const double> last_hidden() const { return lstm.back().hidden; }
};

Vec map_forward(std::span<const double> x, const ParamSet& params);
std::vector<LstmStep> lstm_forward(std::span<const Vec> mapped, const ParamSet& params);
/// Max-shifted softmax.
Vec softmax(std::span<const double> logits);
AttentionTrace attention_forward(std::span<const LstmStep> steps, const ParamSet& params);
/// e = [a; h_T] (or h_T alone without attention), y_hat = w_p . e + b_p.
HeadOutput head_forward(std::span<const double> aggregate, std::span<const double> last_hidden,
                        const ParamSet& params);
/// Head-only recompute from an arbitrary representation.
double head_score(std::span<const double> repr, const ParamSet& params);

inline int classify(double score) { return score >= 0.0 ? 1 : -1; }

ForwardTrace forward(const ParamSet& params, std::span<const Vec> window);
ForwardTrace forward(const ParamSet& params, std::span<const market::FeatureVector> window);

/// Second head evaluation at a shifted representation (the adversarial or
/// random branch) whose loss gradient `upstream` flows back into e.
struct HeadInjection {
  std::span<const double> repr;
  double upstream = 0.0;
};

/// Reverse pass for dLoss/dy_hat = `upstream`. Gradients accumulate into
/// `grads`; the return value is the total dLoss/de.
Vec backward(const ParamSet& params, const ForwardTrace& trace, double upstream, ParamSet& grads,
             std::optional<HeadInjection> injection = std::nullopt);

}  // namespace advalstm::nn
