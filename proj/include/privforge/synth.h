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

#ifndef PRIVFORGE_SYNTH_H_
#define PRIVFORGE_SYNTH_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privforge/corpus.h"
#include "privforge/lm.h"

namespace privforge {

enum class DecodeStrategy { kGreedy, kTopK, kTemperature };

std::string_view DecodeStrategyName(DecodeStrategy s);

struct SamplingConfig {
  DecodeStrategy strategy = DecodeStrategy::kGreedy;
  int top_k = 1;
  // Applied by kTemperature and kTopK.
  double temperature = 1.0;
  int max_tokens = 256;
  std::uint64_t seed = 0;

  void Validate() const;
};

enum class StopReason { kEos, kMaxTokens };

struct GenerationRecord {
  std::string prompt;
  CodeSnippet snippet;
  int tokens_emitted = 0;
  StopReason stop_reason = StopReason::kMaxTokens;

  bool operator==(const GenerationRecord&) const = default;
};

// Picks the next token from `probs`. Only byte ids and EOS are eligible;
// greedy ties go to the lowest id. `uniform` is a draw from [0, 1).
TokenId PickToken(std::span<const double> probs, const SamplingConfig& sampling, double uniform);

// Decodes with an RNG seeded from `sampling.seed`.
GenerationRecord Generate(const LmParams& params, std::string_view prompt,
                          const SamplingConfig& sampling);

// Seed for one record: a hash of (master seed, prompt text, sample index), so a
// record does not depend on where its prompt sits in the list.
std::uint64_t RecordSeed(std::uint64_t master_seed, std::string_view prompt,
                         int sample_index);

// prompts.size() * samples_per_prompt records, prompt-major order.
std::vector<GenerationRecord> BatchGenerate(const LmParams& params,
                                            std::span<const std::string> prompts,
                                            const SamplingConfig& sampling,
                                            int samples_per_prompt);

Dataset RecordsToDataset(std::span<const GenerationRecord> records, std::string id);

}  // namespace privforge

#endif  // PRIVFORGE_SYNTH_H_
