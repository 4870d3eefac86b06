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

#ifndef PRIVFORGE_LM_H_
#define PRIVFORGE_LM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "privforge/corpus.h"
#include "privforge/minilang.h"

namespace privforge {

// Fixed-window neural probabilistic language model:
// embed the last `context_window` tokens, concatenate, tanh MLP, softmax.
struct LmConfig {
  int vocab_size = Vocabulary::kSize;
  int embed_dim = 8;
  int context_window = 16;
  int hidden_dim = 32;
  std::uint64_t seed = 0;

  std::size_t ParamCount() const;
  void Validate() const;
  bool operator==(const LmConfig&) const = default;
};

// All trainable parameters in one contiguous vector. Segment order:
// embedding (V x d), input projection (w*d x h), hidden bias (h),
// output projection (h x V), output bias (V). Matrices are row-major.
class LmParams {
 public:
  LmParams() = default;
  // Zero-initialized.
  explicit LmParams(const LmConfig& config);

  const LmConfig& config() const { return config_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  std::span<double> embedding() { return Segment(0, EmbeddingSize()); }
  std::span<double> input_projection() { return Segment(InputProjOffset(), InputProjSize()); }
  std::span<double> hidden_bias() { return Segment(HiddenBiasOffset(), Hidden()); }
  std::span<double> output_projection() { return Segment(OutputProjOffset(), OutputProjSize()); }
  std::span<double> output_bias() { return Segment(OutputBiasOffset(), Vocab()); }

  std::span<const double> embedding() const { return Segment(0, EmbeddingSize()); }
  std::span<const double> input_projection() const {
    return Segment(InputProjOffset(), InputProjSize());
  }
  std::span<const double> hidden_bias() const { return Segment(HiddenBiasOffset(), Hidden()); }
  std::span<const double> output_projection() const {
    return Segment(OutputProjOffset(), OutputProjSize());
  }
  std::span<const double> output_bias() const { return Segment(OutputBiasOffset(), Vocab()); }

  std::size_t InputProjOffset() const { return EmbeddingSize(); }
  std::size_t HiddenBiasOffset() const { return InputProjOffset() + InputProjSize(); }
  std::size_t OutputProjOffset() const { return HiddenBiasOffset() + Hidden(); }
  std::size_t OutputBiasOffset() const { return OutputProjOffset() + OutputProjSize(); }

  bool operator==(const LmParams&) const = default;

 private:
  std::size_t Vocab() const { return static_cast<std::size_t>(config_.vocab_size); }
  std::size_t Hidden() const { return static_cast<std::size_t>(config_.hidden_dim); }
  std::size_t EmbeddingSize() const { return Vocab() * config_.embed_dim; }
  std::size_t InputProjSize() const {
    return static_cast<std::size_t>(config_.context_window) * config_.embed_dim * Hidden();
  }
  std::size_t OutputProjSize() const { return Hidden() * Vocab(); }

  std::span<double> Segment(std::size_t offset, std::size_t n) {
    return std::span<double>(data_).subspan(offset, n);
  }
  std::span<const double> Segment(std::size_t offset, std::size_t n) const {
    return std::span<const double>(data_).subspan(offset, n);
  }

  LmConfig config_;
  std::vector<double> data_;
};

// Uniform in [-0.05, 0.05], deterministic in config.seed.
LmParams InitParams(const LmConfig& config);

using ProbDist = std::vector<double>;

// `context` must hold exactly context_window ids (left-pad with PAD).
ProbDist Forward(const LmParams& params, std::span<const TokenId> context);

// Left-padded window ending just before `position`.
std::vector<TokenId> ContextAt(std::span<const TokenId> tokens, std::size_t position,
                               int window);

struct LossBreakdown {
  double ce = 0.0;
  double kl = 0.0;
  double lambda = 0.0;
  double total = 0.0;
};

// A tokenized training record. Targets are tokens[target_begin..]; the
// structural mask has one entry per target position.
struct TrainingExample {
  std::vector<TokenId> tokens;
  std::size_t target_begin = 0;
  std::vector<std::uint8_t> structural;

  std::size_t num_targets() const { return tokens.size() - target_begin; }
};

// Target positions covered by any span are structural; EOS never is.
TrainingExample MakeExample(const PromptCodePair& pair,
                            std::span<const minilang::StructuralSpan> spans);

// Spans from the snippet's syntax tree, or none when it does not parse.
TrainingExample MakeExample(const PromptCodePair& pair);

struct SequenceNllResult {
  double ce = 0.0;
  std::vector<ProbDist> dists;  // one per target position
};

// Mean negative log-likelihood over snippet positions (snippet bytes + EOS).
SequenceNllResult SequenceNll(const LmParams& params, const PromptCodePair& pair);

// Mean KL(current || reference) over structural target positions; 0 without
// structural positions.
double StructuralKl(const LmParams& current, const LmParams& reference,
                    const PromptCodePair& pair,
                    std::span<const minilang::StructuralSpan> spans);

double KlDivergence(std::span<const double> p, std::span<const double> q);

// Forward-only evaluation of L_CE + lambda * L_KL.
LossBreakdown ExampleLoss(const LmParams& current, const LmParams& reference,
                          const TrainingExample& example, double lambda);

struct SampleGradient {
  std::vector<double> grad;  // same layout as LmParams::flat()
  LossBreakdown loss;
};

// Analytic gradient of the total loss with respect to `current` only.
SampleGradient PerSampleGradient(const LmParams& current, const LmParams& reference,
                                 const TrainingExample& example, double lambda);

SampleGradient PerSampleGradient(const LmParams& current, const LmParams& reference,
                                 const PromptCodePair& pair,
                                 std::span<const minilang::StructuralSpan> spans,
                                 double lambda);

// Per-sample gradients for a batch. The OpenMP version and the serial
// reference produce bit-identical output (each sample is independent).
std::vector<SampleGradient> BatchGradients(const LmParams& current, const LmParams& reference,
                                           std::span<const TrainingExample> batch,
                                           double lambda);
std::vector<SampleGradient> BatchGradientsSerial(const LmParams& current,
                                                 const LmParams& reference,
                                                 std::span<const TrainingExample> batch,
                                                 double lambda);

}  // namespace privforge

#endif  // PRIVFORGE_LM_H_
