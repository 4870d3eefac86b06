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

#include "privforge/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "privforge/checkpoint.h"
#include "privforge/error.h"

namespace privforge {
namespace {

bool Eligible(std::size_t id) {
  return id < 256 || static_cast<TokenId>(id) == Vocabulary::kEos;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view DecodeStrategyName(DecodeStrategy s) {
  switch (s) {
    case DecodeStrategy::kGreedy: return "greedy";
    case DecodeStrategy::kTopK: return "topk";
    case DecodeStrategy::kTemperature: return "temperature";
  }
  return "?";
}

void SamplingConfig::Validate() const {
  if (top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  if (!(temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be > 0");
  if (max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
}

TokenId PickToken(std::span<const double> probs, const SamplingConfig& sampling, double uniform) {
  if (sampling.strategy == DecodeStrategy::kGreedy) {
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (Eligible(k) && probs[k] > best_p) {
        best = k;
        best_p = probs[k];
      }
    }
    return static_cast<TokenId>(best);
  }

  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (Eligible(k)) candidates.push_back(k);
  }
  if (sampling.strategy == DecodeStrategy::kTopK &&
      static_cast<std::size_t>(sampling.top_k) < candidates.size()) {
    // Stable sort keeps lower ids first among equal probabilities.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
    candidates.resize(static_cast<std::size_t>(sampling.top_k));
    std::sort(candidates.begin(), candidates.end());
  }
  // Temperature rescaling in log space: p^(1/T).
  std::vector<double> weights(candidates.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double p = probs[candidates[i]];
    weights[i] = p > 0.0 ? std::log(p) / sampling.temperature
                         : -std::numeric_limits<double>::infinity();
    max_log = std::max(max_log, weights[i]);
  }
  double total = 0.0;
  for (double& w : weights) {
    w = std::exp(w - max_log);
    total += w;
  }
  double threshold = uniform * total;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    threshold -= weights[i];
    if (threshold < 0.0) return static_cast<TokenId>(candidates[i]);
  }
  // Rounding left a sliver at the top: return the last candidate with mass.
  for (std::size_t i = candidates.size(); i-- > 0;) {
    if (weights[i] > 0.0) return static_cast<TokenId>(candidates[i]);
  }
  return static_cast<TokenId>(candidates.front());
}

GenerationRecord Generate(const LmParams& params, std::string_view prompt,
                          const SamplingConfig& sampling) {
  sampling.Validate();
  std::vector<TokenId> tokens = PromptPrefix(prompt);
  std::mt19937_64 rng(sampling.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int window = params.config().context_window;

  GenerationRecord rec;
  rec.prompt = std::string(prompt);
  std::vector<TokenId> emitted;
  while (rec.tokens_emitted < sampling.max_tokens) {
    const ProbDist probs = Forward(params, ContextAt(tokens, tokens.size(), window));
    const double u = sampling.strategy == DecodeStrategy::kGreedy ? 0.0 : unit(rng);
    const TokenId next = PickToken(probs, sampling, u);
    ++rec.tokens_emitted;
    if (next == Vocabulary::kEos) {
      rec.stop_reason = StopReason::kEos;
      break;
    }
    emitted.push_back(next);
    tokens.push_back(next);
  }
  if (rec.tokens_emitted >= sampling.max_tokens && rec.stop_reason != StopReason::kEos) {
    rec.stop_reason = StopReason::kMaxTokens;
  }
  rec.snippet.source = Detokenize(emitted);
  rec.snippet.language = LanguageTag::kMiniLang;
  return rec;
}

std::uint64_t RecordSeed(std::uint64_t master_seed, std::string_view prompt, int sample_index) {
  std::uint64_t h = SplitMix64(master_seed);
  h = SplitMix64(h ^ Fnv1a64(prompt));
  return SplitMix64(h ^ static_cast<std::uint64_t>(sample_index));
}

std::vector<GenerationRecord> BatchGenerate(const LmParams& params,
                                            std::span<const std::string> prompts,
                                            const SamplingConfig& sampling,
                                            int samples_per_prompt) {
  sampling.Validate();
  if (prompts.empty()) throw Error(ErrorCode::kInvalidArgument, "no prompts");
  if (samples_per_prompt < 1) throw Error(ErrorCode::kInvalidArgument, "samples_per_prompt must be >= 1");
  const std::size_t per = static_cast<std::size_t>(samples_per_prompt);
  std::vector<GenerationRecord> out(prompts.size() * per);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::size_t p = static_cast<std::size_t>(i) / per;
    const int s = static_cast<int>(static_cast<std::size_t>(i) % per);
    SamplingConfig local = sampling;
    local.seed = RecordSeed(sampling.seed, prompts[p], s);
    out[static_cast<std::size_t>(i)] = Generate(params, prompts[p], local);
  }
  return out;
}

Dataset RecordsToDataset(std::span<const GenerationRecord> records, std::string id) {
  Dataset ds;
  ds.id = std::move(id);
  for (const auto& r : records) {
    PromptCodePair pair;
    pair.prompt = r.prompt;
    pair.snippet = r.snippet;
    ds.pairs.push_back(std::move(pair));
  }
  return ds;
}

}  // namespace privforge
