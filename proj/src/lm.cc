// Copyright 2026 The PrivForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privforge/lm.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

#include "privforge/error.h"

namespace privforge {

std::size_t LmConfig::ParamCount() const {
  const std::size_t v = vocab_size, d = embed_dim, w = context_window, h = hidden_dim;
  return v * d + w * d * h + h + h * v + v;
}

void LmConfig::Validate() const {
  if (vocab_size < 1 || embed_dim < 1 || context_window < 1 || hidden_dim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "LmConfig dimensions must be >= 1");
  }
}

LmParams::LmParams(const LmConfig& config) : config_(config) {
  config_.Validate();
  data_.assign(config_.ParamCount(), 0.0);
}

LmParams InitParams(const LmConfig& config) {
  LmParams params(config);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  for (double& x : params.flat()) x = dist(rng);
  return params;
}

namespace {

// Activations of one forward pass, kept for backprop.
struct Activations {
  std::vector<double> input;   // w*d concatenated embeddings
  std::vector<double> hidden;  // tanh output
  std::vector<double> log_probs;
};

void CheckTokens(std::span<const TokenId> context, int vocab) {
  for (TokenId t : context) {
    if (t < 0 || t >= vocab) {
      throw Error(ErrorCode::kTokenOutOfRange, "token " + std::to_string(t));
    }
  }
}

void ForwardInto(const LmParams& params, std::span<const TokenId> context, Activations& act) {
  const LmConfig& cfg = params.config();
  const std::size_t d = cfg.embed_dim, h = cfg.hidden_dim, v = cfg.vocab_size;
  const std::size_t w = cfg.context_window;
  const auto emb = params.embedding();
  const auto w1 = params.input_projection();
  const auto b1 = params.hidden_bias();
  const auto w2 = params.output_projection();
  const auto b2 = params.output_bias();

  act.input.resize(w * d);
  for (std::size_t s = 0; s < w; ++s) {
    const std::size_t row = static_cast<std::size_t>(context[s]) * d;
    std::copy_n(emb.begin() + row, d, act.input.begin() + s * d);
  }

  act.hidden.assign(b1.begin(), b1.end());
  for (std::size_t i = 0; i < w * d; ++i) {
    const double xi = act.input[i];
    if (xi == 0.0) continue;
    const double* row = w1.data() + i * h;
    for (std::size_t j = 0; j < h; ++j) act.hidden[j] += xi * row[j];
  }
  for (double& a : act.hidden) a = std::tanh(a);

  std::vector<double>& z = act.log_probs;
  z.assign(b2.begin(), b2.end());
  for (std::size_t j = 0; j < h; ++j) {
    const double hj = act.hidden[j];
    const double* row = w2.data() + j * v;
    for (std::size_t k = 0; k < v; ++k) z[k] += hj * row[k];
  }
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double zk : z) sum += std::exp(zk - zmax);
  const double lse = zmax + std::log(sum);
  for (double& zk : z) zk -= lse;
}

// Accumulates d(loss)/d(params) given d(loss)/d(logits).
void Backward(const LmParams& params, std::span<const TokenId> context, const Activations& act,
              std::span<const double> dlogits, std::span<double> grad,
              std::vector<double>& scratch_h, std::vector<double>& scratch_x) {
  const LmConfig& cfg = params.config();
  const std::size_t d = cfg.embed_dim, h = cfg.hidden_dim, v = cfg.vocab_size;
  const std::size_t w = cfg.context_window;
  const auto w1 = params.input_projection();
  const auto w2 = params.output_projection();

  double* g_emb = grad.data();
  double* g_w1 = grad.data() + params.InputProjOffset();
  double* g_b1 = grad.data() + params.HiddenBiasOffset();
  double* g_w2 = grad.data() + params.OutputProjOffset();
  double* g_b2 = grad.data() + params.OutputBiasOffset();

  for (std::size_t k = 0; k < v; ++k) g_b2[k] += dlogits[k];

  scratch_h.assign(h, 0.0);
  for (std::size_t j = 0; j < h; ++j) {
    const double hj = act.hidden[j];
    const double* row = w2.data() + j * v;
    double* grow = g_w2 + j * v;
    double acc = 0.0;
    for (std::size_t k = 0; k < v; ++k) {
      grow[k] += hj * dlogits[k];
      acc += row[k] * dlogits[k];
    }
    scratch_h[j] = acc * (1.0 - hj * hj);
  }
  for (std::size_t j = 0; j < h; ++j) g_b1[j] += scratch_h[j];

  scratch_x.assign(w * d, 0.0);
  for (std::size_t i = 0; i < w * d; ++i) {
    const double xi = act.input[i];
    const double* row = w1.data() + i * h;
    double* grow = g_w1 + i * h;
    double acc = 0.0;
    for (std::size_t j = 0; j < h; ++j) {
      grow[j] += xi * scratch_h[j];
      acc += row[j] * scratch_h[j];
    }
    scratch_x[i] = acc;
  }
  for (std::size_t s = 0; s < w; ++s) {
    double* erow = g_emb + static_cast<std::size_t>(context[s]) * d;
    for (std::size_t k = 0; k < d; ++k) erow[k] += scratch_x[s * d + k];
  }
}

void FillContext(std::span<const TokenId> tokens, std::size_t position, int window,
                 std::vector<TokenId>& out) {
  out.resize(static_cast<std::size_t>(window));
  for (int s = 0; s < window; ++s) {
    const std::ptrdiff_t src =
        static_cast<std::ptrdiff_t>(position) - window + s;
    out[static_cast<std::size_t>(s)] =
        src < 0 ? Vocabulary::kPad : tokens[static_cast<std::size_t>(src)];
  }
}

std::size_t CountStructural(const TrainingExample& ex) {
  return static_cast<std::size_t>(std::count(ex.structural.begin(), ex.structural.end(), 1));
}

void CheckExample(const LmParams& params, const TrainingExample& ex) {
  if (ex.target_begin == 0 || ex.target_begin >= ex.tokens.size()) {
    throw Error(ErrorCode::kEmptySnippet, "training example has no targets");
  }
  if (ex.structural.size() != ex.num_targets()) {
    throw Error(ErrorCode::kInvalidArgument, "structural mask length mismatch");
  }
  CheckTokens(ex.tokens, params.config().vocab_size);
}

// KL(P || Q) with both given as log-probabilities.
double KlFromLogs(std::span<const double> log_p, std::span<const double> log_q) {
  double kl = 0.0;
  for (std::size_t k = 0; k < log_p.size(); ++k) {
    const double p = std::exp(log_p[k]);
    if (p > 0.0) kl += p * (log_p[k] - log_q[k]);
  }
  return std::max(kl, 0.0);
}

}  // namespace

ProbDist Forward(const LmParams& params, std::span<const TokenId> context) {
  if (context.size() != static_cast<std::size_t>(params.config().context_window)) {
    throw Error(ErrorCode::kInvalidArgument, "context length must equal the window");
  }
  CheckTokens(context, params.config().vocab_size);
  Activations act;
  ForwardInto(params, context, act);
  ProbDist p(act.log_probs.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(act.log_probs[k]);
  return p;
}

std::vector<TokenId> ContextAt(std::span<const TokenId> tokens, std::size_t position,
                               int window) {
  std::vector<TokenId> out;
  FillContext(tokens, position, window, out);
  return out;
}

TrainingExample MakeExample(const PromptCodePair& pair,
                            std::span<const minilang::StructuralSpan> spans) {
  JoinedSequence seq = JoinPromptAndSnippet(pair.prompt, pair.snippet.source);
  TrainingExample ex;
  ex.target_begin = seq.target_begin;
  ex.tokens = std::move(seq.tokens);
  ex.structural.assign(ex.num_targets(), 0);
  const std::size_t snippet_len = pair.snippet.source.size();
  for (const auto& span : spans) {
    const std::size_t end = std::min(span.span.end, snippet_len);
    for (std::size_t k = span.span.begin; k < end; ++k) ex.structural[k] = 1;
  }
  return ex;
}

TrainingExample MakeExample(const PromptCodePair& pair) {
  minilang::ParseResult parsed = minilang::Parse(pair.snippet.source);
  if (!parsed.ok()) return MakeExample(pair, {});
  const auto spans = minilang::ExtractStructuralTokens(pair.snippet.source, parsed.tree());
  return MakeExample(pair, spans);
}

SequenceNllResult SequenceNll(const LmParams& params, const PromptCodePair& pair) {
  if (pair.snippet.source.empty()) throw Error(ErrorCode::kEmptySnippet, "empty snippet");
  const TrainingExample ex = MakeExample(pair, {});
  CheckExample(params, ex);
  SequenceNllResult result;
  Activations act;
  std::vector<TokenId> ctx;
  double total = 0.0;
  for (std::size_t pos = ex.target_begin; pos < ex.tokens.size(); ++pos) {
    FillContext(ex.tokens, pos, params.config().context_window, ctx);
    ForwardInto(params, ctx, act);
    total -= act.log_probs[static_cast<std::size_t>(ex.tokens[pos])];
    ProbDist p(act.log_probs.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(act.log_probs[k]);
    result.dists.push_back(std::move(p));
  }
  result.ce = total / static_cast<double>(ex.num_targets());
  return result;
}

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kInvalidArgument, "distribution sizes differ");
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) kl += p[k] * std::log(p[k] / q[k]);
  }
  return std::max(kl, 0.0);
}

double StructuralKl(const LmParams& current, const LmParams& reference,
                    const PromptCodePair& pair,
                    std::span<const minilang::StructuralSpan> spans) {
  const TrainingExample ex = MakeExample(pair, spans);
  return ExampleLoss(current, reference, ex, 0.0).kl;
}

namespace {

bool SameShape(const LmConfig& a, const LmConfig& b) {
  return a.vocab_size == b.vocab_size && a.embed_dim == b.embed_dim &&
         a.context_window == b.context_window && a.hidden_dim == b.hidden_dim;
}

}  // namespace

LossBreakdown ExampleLoss(const LmParams& current, const LmParams& reference,
                          const TrainingExample& ex, double lambda) {
  CheckExample(current, ex);
  if (!SameShape(reference.config(), current.config()) && CountStructural(ex) > 0) {
    throw Error(ErrorCode::kInvalidArgument, "reference model shape differs");
  }
  const int window = current.config().context_window;
  const std::size_t n_struct = CountStructural(ex);
  Activations act, ref_act;
  std::vector<TokenId> ctx;
  double ce = 0.0, kl = 0.0;
  for (std::size_t pos = ex.target_begin; pos < ex.tokens.size(); ++pos) {
    FillContext(ex.tokens, pos, window, ctx);
    ForwardInto(current, ctx, act);
    ce -= act.log_probs[static_cast<std::size_t>(ex.tokens[pos])];
    if (ex.structural[pos - ex.target_begin] != 0) {
      ForwardInto(reference, ctx, ref_act);
      kl += KlFromLogs(act.log_probs, ref_act.log_probs);
    }
  }
  LossBreakdown loss;
  loss.ce = ce / static_cast<double>(ex.num_targets());
  loss.kl = n_struct == 0 ? 0.0 : kl / static_cast<double>(n_struct);
  loss.lambda = lambda;
  loss.total = loss.ce + lambda * loss.kl;
  return loss;
}

SampleGradient PerSampleGradient(const LmParams& current, const LmParams& reference,
                                 const TrainingExample& ex, double lambda) {
  CheckExample(current, ex);
  if (!SameShape(reference.config(), current.config()) && CountStructural(ex) > 0) {
    throw Error(ErrorCode::kInvalidArgument, "reference model shape differs");
  }
  const int window = current.config().context_window;
  const std::size_t v = static_cast<std::size_t>(current.config().vocab_size);
  const std::size_t n_targets = ex.num_targets();
  const std::size_t n_struct = CountStructural(ex);
  const double ce_scale = 1.0 / static_cast<double>(n_targets);
  const double kl_scale = n_struct == 0 ? 0.0 : 1.0 / static_cast<double>(n_struct);

  SampleGradient out;
  out.grad.assign(current.size(), 0.0);
  Activations act, ref_act;
  std::vector<TokenId> ctx;
  std::vector<double> dlogits(v), scratch_h, scratch_x;
  double ce = 0.0, kl = 0.0;

  for (std::size_t pos = ex.target_begin; pos < ex.tokens.size(); ++pos) {
    FillContext(ex.tokens, pos, window, ctx);
    ForwardInto(current, ctx, act);
    const std::size_t target = static_cast<std::size_t>(ex.tokens[pos]);
    ce -= act.log_probs[target];

    // d(-log p_y)/dz = p - onehot(y)
    for (std::size_t k = 0; k < v; ++k) dlogits[k] = ce_scale * std::exp(act.log_probs[k]);
    dlogits[target] -= ce_scale;

    if (ex.structural[pos - ex.target_begin] != 0) {
      ForwardInto(reference, ctx, ref_act);
      const double pos_kl = KlFromLogs(act.log_probs, ref_act.log_probs);
      kl += pos_kl;
      // d KL(P||Q)/dz_k = P_k (log P_k - log Q_k - KL)
      const double scale = lambda * kl_scale;
      if (scale != 0.0) {
        for (std::size_t k = 0; k < v; ++k) {
          const double p = std::exp(act.log_probs[k]);
          dlogits[k] += scale * p * (act.log_probs[k] - ref_act.log_probs[k] - pos_kl);
        }
      }
    }
    Backward(current, ctx, act, dlogits, out.grad, scratch_h, scratch_x);
  }
  out.loss.ce = ce * ce_scale;
  out.loss.kl = kl * kl_scale;
  out.loss.lambda = lambda;
  out.loss.total = out.loss.ce + lambda * out.loss.kl;
  return out;
}

SampleGradient PerSampleGradient(const LmParams& current, const LmParams& reference,
                                 const PromptCodePair& pair,
                                 std::span<const minilang::StructuralSpan> spans,
                                 double lambda) {
  return PerSampleGradient(current, reference, MakeExample(pair, spans), lambda);
}

std::vector<SampleGradient> BatchGradients(const LmParams& current, const LmParams& reference,
                                           std::span<const TrainingExample> batch,
                                           double lambda) {
  std::vector<SampleGradient> out(batch.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(batch.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] =
          PerSampleGradient(current, reference, batch[static_cast<std::size_t>(i)], lambda);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<SampleGradient> BatchGradientsSerial(const LmParams& current,
                                                 const LmParams& reference,
                                                 std::span<const TrainingExample> batch,
                                                 double lambda) {
  std::vector<SampleGradient> out;
  out.reserve(batch.size());
  for (const auto& ex : batch) out.push_back(PerSampleGradient(current, reference, ex, lambda));
  return out;
}

}  // namespace privforge
