#include "advalstm/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "advalstm/error.hpp"

namespace advalstm::nn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::kShape, what);
}

}  // namespace

Vec map_forward(std::span<const double> x, const ParamSet& params) {
  const Tensor& w = params[ParamId::kMapWeight];
  const Tensor& b = params[ParamId::kMapBias];
  require(x.size() == w.cols(), "map_forward: input length does not match map.weight columns");
  Vec m(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) m[r] = std::tanh(dot(w.row(r), x) + b[r]);
  return m;
}

std::vector<LstmStep> lstm_forward(std::span<const Vec> mapped, const ParamSet& params) {
  const Tensor& w = params[ParamId::kGateWeight];
  const Tensor& b = params[ParamId::kGateBias];
  const std::size_t U = params.dims().hidden;
  const std::size_t E = params.dims().mapping;
  require(!mapped.empty(), "lstm_forward: empty sequence");

  std::vector<LstmStep> steps;
  steps.reserve(mapped.size());
  Vec h_prev(U, 0.0);
  Vec c_prev(U, 0.0);
  Vec joint(E + U);
  for (const Vec& m : mapped) {
    require(m.size() == E, "lstm_forward: mapped input length != E");
    std::copy(m.begin(), m.end(), joint.begin());
    std::copy(h_prev.begin(), h_prev.end(), joint.begin() + static_cast<std::ptrdiff_t>(E));

    LstmStep s{Vec(U), Vec(U), Vec(U), Vec(U), Vec(U), Vec(U), Vec(U)};
    for (std::size_t j = 0; j < U; ++j) {
      const auto pre = [&](Gate g) {
        const std::size_t row = static_cast<std::size_t>(g) * U + j;
        return dot(w.row(row), joint) + b[row];
      };
      s.input_gate[j] = sigmoid(pre(Gate::kInput));
      s.forget_gate[j] = sigmoid(pre(Gate::kForget));
      s.output_gate[j] = sigmoid(pre(Gate::kOutput));
      s.candidate[j] = std::tanh(pre(Gate::kCandidate));
      s.cell[j] = s.forget_gate[j] * c_prev[j] + s.input_gate[j] * s.candidate[j];
      s.cell_tanh[j] = std::tanh(s.cell[j]);
      s.hidden[j] = s.output_gate[j] * s.cell_tanh[j];
    }
    check_finite(s.cell, "lstm cell");
    h_prev = s.hidden;
    c_prev = s.cell;
    steps.push_back(std::move(s));
  }
  return steps;
}

Vec softmax(std::span<const double> logits) {
  require(!logits.empty(), "softmax: empty input");
  const double peak = *std::max_element(logits.begin(), logits.end());
  Vec out(logits.size());
  double total = 0.0;
  for (std::size_t t = 0; t < logits.size(); ++t) {
    out[t] = std::exp(logits[t] - peak);
    total += out[t];
  }
  for (double& a : out) a /= total;
  return out;
}

AttentionTrace attention_forward(std::span<const LstmStep> steps, const ParamSet& params) {
  const Tensor& w = params[ParamId::kAttWeight];
  const Tensor& b = params[ParamId::kAttBias];
  const Tensor& u = params[ParamId::kAttContext];
  const std::size_t U = params.dims().hidden;
  require(!steps.empty(), "attention_forward: empty sequence");
  require(w.cols() == U, "attention_forward: attention.weight columns != U");

  AttentionTrace att;
  att.logits.resize(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    Vec z(w.rows());
    for (std::size_t r = 0; r < w.rows(); ++r) z[r] = std::tanh(dot(w.row(r), steps[t].hidden) + b[r]);
    att.logits[t] = dot(u.data(), z);
    att.projected.push_back(std::move(z));
  }
  att.weights = softmax(att.logits);

  att.aggregate.assign(U, 0.0);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    for (std::size_t j = 0; j < U; ++j) att.aggregate[j] += att.weights[t] * steps[t].hidden[j];
  }
  return att;
}

double head_score(std::span<const double> repr, const ParamSet& params) {
  const Tensor& w = params[ParamId::kHeadWeight];
  require(repr.size() == w.size(), "head: representation length != head.weight length");
  return dot(w.data(), repr) + params[ParamId::kHeadBias][0];
}

HeadOutput head_forward(std::span<const double> aggregate, std::span<const double> last_hidden,
                        const ParamSet& params) {
  HeadOutput out;
  if (params.dims().use_attention) out.repr.assign(aggregate.begin(), aggregate.end());
  out.repr.insert(out.repr.end(), last_hidden.begin(), last_hidden.end());
  out.score = head_score(out.repr, params);
  return out;
}

ForwardTrace forward(const ParamSet& params, std::span<const Vec> window) {
  require(!window.empty(), "forward: empty window");
  ForwardTrace trace;
  trace.inputs.assign(window.begin(), window.end());
  trace.mapped.reserve(window.size());
  for (const Vec& x : window) trace.mapped.push_back(map_forward(x, params));
  trace.lstm = lstm_forward(trace.mapped, params);
  if (params.dims().use_attention) trace.attention = attention_forward(trace.lstm, params);
  HeadOutput head = head_forward(trace.attention.aggregate, trace.last_hidden(), params);
  trace.repr = std::move(head.repr);
  trace.score = head.score;
  if (!std::isfinite(trace.score)) fail(ErrorKind::kNumeric, "forward produced a non-finite score");
  return trace;
}

ForwardTrace forward(const ParamSet& params, std::span<const market::FeatureVector> window) {
  std::vector<Vec> rows;
  rows.reserve(window.size());
  for (const auto& f : window) rows.emplace_back(f.begin(), f.end());
  return forward(params, rows);
}

Vec backward(const ParamSet& params, const ForwardTrace& trace, double upstream, ParamSet& grads,
             std::optional<HeadInjection> injection) {
  params.check_same_shape(grads, "backward");
  const ModelDims& dims = params.dims();
  const std::size_t U = dims.hidden;
  const std::size_t E = dims.mapping;
  const std::size_t T = trace.lstm.size();
  require(T > 0 && trace.mapped.size() == T && trace.inputs.size() == T,
          "backward: incomplete forward trace");
  require(trace.repr.size() == dims.repr_size(), "backward: trace does not match parameter dims");

  // Prediction head.
  const Tensor& w_head = params[ParamId::kHeadWeight];
  Tensor& g_head = grads[ParamId::kHeadWeight];
  double repr_upstream = upstream;
  for (std::size_t k = 0; k < w_head.size(); ++k) g_head[k] += upstream * trace.repr[k];
  grads[ParamId::kHeadBias][0] += upstream;
  if (injection) {
    require(injection->repr.size() == w_head.size(), "backward: injected representation length");
    for (std::size_t k = 0; k < w_head.size(); ++k) g_head[k] += injection->upstream * injection->repr[k];
    grads[ParamId::kHeadBias][0] += injection->upstream;
    repr_upstream += injection->upstream;
  }
  Vec d_repr(w_head.size());
  for (std::size_t k = 0; k < w_head.size(); ++k) d_repr[k] = repr_upstream * w_head[k];

  // Gradient arriving at each h_t from outside the recurrence.
  std::vector<Vec> d_hidden(T, Vec(U, 0.0));
  const std::size_t last_offset = dims.use_attention ? U : 0;
  for (std::size_t j = 0; j < U; ++j) d_hidden[T - 1][j] += d_repr[last_offset + j];

  if (dims.use_attention) {
    const AttentionTrace& att = trace.attention;
    const Tensor& w_att = params[ParamId::kAttWeight];
    const Tensor& u_att = params[ParamId::kAttContext];
    Tensor& g_w_att = grads[ParamId::kAttWeight];
    Tensor& g_b_att = grads[ParamId::kAttBias];
    Tensor& g_u_att = grads[ParamId::kAttContext];
    const std::span<const double> d_agg(d_repr.data(), U);

    Vec d_weight(T);
    double weighted = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      d_weight[t] = dot(d_agg, trace.lstm[t].hidden);
      weighted += att.weights[t] * d_weight[t];
      for (std::size_t j = 0; j < U; ++j) d_hidden[t][j] += att.weights[t] * d_agg[j];
    }
    const std::size_t A = w_att.rows();
    for (std::size_t t = 0; t < T; ++t) {
      const double d_logit = att.weights[t] * (d_weight[t] - weighted);
      const Vec& z = att.projected[t];
      const Vec& h = trace.lstm[t].hidden;
      for (std::size_t r = 0; r < A; ++r) {
        g_u_att[r] += d_logit * z[r];
        const double d_pre = d_logit * u_att[r] * (1.0 - z[r] * z[r]);
        g_b_att[r] += d_pre;
        for (std::size_t j = 0; j < U; ++j) {
          g_w_att(r, j) += d_pre * h[j];
          d_hidden[t][j] += d_pre * w_att(r, j);
        }
      }
    }
  }

  // LSTM, backpropagation through time.
  const Tensor& w_gate = params[ParamId::kGateWeight];
  Tensor& g_w_gate = grads[ParamId::kGateWeight];
  Tensor& g_b_gate = grads[ParamId::kGateBias];
  std::vector<Vec> d_mapped(T, Vec(E, 0.0));
  Vec d_h_next(U, 0.0);
  Vec d_c_next(U, 0.0);
  Vec d_pre(4 * U);
  Vec joint(E + U);
  const Vec zeros(U, 0.0);
  for (std::size_t t = T; t-- > 0;) {
    const LstmStep& s = trace.lstm[t];
    const Vec& c_prev = t > 0 ? trace.lstm[t - 1].cell : zeros;
    const Vec& h_prev = t > 0 ? trace.lstm[t - 1].hidden : zeros;
    for (std::size_t j = 0; j < U; ++j) {
      const double dh = d_hidden[t][j] + d_h_next[j];
      const double d_out = dh * s.cell_tanh[j];
      const double dc = d_c_next[j] + dh * s.output_gate[j] * (1.0 - s.cell_tanh[j] * s.cell_tanh[j]);
      const double d_in = dc * s.candidate[j];
      const double d_cand = dc * s.input_gate[j];
      const double d_forget = dc * c_prev[j];
      d_c_next[j] = dc * s.forget_gate[j];
      d_pre[static_cast<std::size_t>(Gate::kInput) * U + j] = d_in * s.input_gate[j] * (1.0 - s.input_gate[j]);
      d_pre[static_cast<std::size_t>(Gate::kForget) * U + j] =
          d_forget * s.forget_gate[j] * (1.0 - s.forget_gate[j]);
      d_pre[static_cast<std::size_t>(Gate::kOutput) * U + j] =
          d_out * s.output_gate[j] * (1.0 - s.output_gate[j]);
      d_pre[static_cast<std::size_t>(Gate::kCandidate) * U + j] =
          d_cand * (1.0 - s.candidate[j] * s.candidate[j]);
    }
    std::copy(trace.mapped[t].begin(), trace.mapped[t].end(), joint.begin());
    std::copy(h_prev.begin(), h_prev.end(), joint.begin() + static_cast<std::ptrdiff_t>(E));
    std::fill(d_h_next.begin(), d_h_next.end(), 0.0);
    for (std::size_t r = 0; r < 4 * U; ++r) {
      const double g = d_pre[r];
      g_b_gate[r] += g;
      for (std::size_t k = 0; k < E + U; ++k) {
        g_w_gate(r, k) += g * joint[k];
        if (k < E) {
          d_mapped[t][k] += g * w_gate(r, k);
        } else {
          d_h_next[k - E] += g * w_gate(r, k);
        }
      }
    }
  }

  // Feature mapping.
  Tensor& g_w_map = grads[ParamId::kMapWeight];
  Tensor& g_b_map = grads[ParamId::kMapBias];
  for (std::size_t t = 0; t < T; ++t) {
    const Vec& m = trace.mapped[t];
    const Vec& x = trace.inputs[t];
    for (std::size_t r = 0; r < E; ++r) {
      const double d = d_mapped[t][r] * (1.0 - m[r] * m[r]);
      g_b_map[r] += d;
      for (std::size_t k = 0; k < x.size(); ++k) g_w_map(r, k) += d * x[k];
    }
  }
  return d_repr;
}

}  // namespace advalstm::nn
