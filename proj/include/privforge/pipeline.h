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

#ifndef PRIVFORGE_PIPELINE_H_
#define PRIVFORGE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "privforge/corpus.h"
#include "privforge/evaluation.h"
#include "privforge/filters.h"
#include "privforge/lm.h"
#include "privforge/minilang.h"
#include "privforge/privacy.h"
#include "privforge/privsa.h"
#include "privforge/synth.h"

namespace privforge {

enum class PipelineMode { kPrivCode, kDpft, kJft, kNonDpft };

std::string_view PipelineModeName(PipelineMode m);
PipelineMode ParsePipelineMode(std::string_view name);

struct PipelineConfig {
  PipelineMode mode = PipelineMode::kPrivCode;
  std::uint64_t seed = 17;

  std::filesystem::path sensitive_path;
  std::filesystem::path public_code_path;
  std::filesystem::path prompts_path;
  std::filesystem::path benchmark_path;
  std::filesystem::path canaries_path;  // empty disables the audit
  std::filesystem::path out_dir = "privforge_out";

  LmConfig junior{Vocabulary::kSize, 8, 12, 24, 0};
  LmConfig premium{Vocabulary::kSize, 12, 16, 48, 0};

  // Non-private warm start of both models on the public code corpus.
  PlainTrainConfig pretrain{6, 16, 1e-2, 0};

  // DP stage: stage 1 for PrivCode, the premium model for DPFT, phase 2 for JFT.
  TrainConfig dp_train;
  double target_epsilon = 4.0;  // > 0 calibrates the noise scale

  SamplingConfig sampling;
  int samples_per_prompt = 2;
  RoundTripConfig round_trip;
  minilang::ExecBudget budget;

  // Non-private fine-tuning: stage 2, NonDPFT, JFT phase 1.
  PlainTrainConfig finetune{8, 16, 1e-2, 0};

  int eval_max_tokens = 160;
  int canary_repetition = 0;
  int audit_generations = 100;

  void Validate() const;
  // Stable hash of the canonical key=value rendering.
  std::uint64_t Hash() const;
  std::map<std::string, std::string> ToMap() const;
};

// Flat key=value text; '#' starts a comment. Unknown keys are errors.
// Relative paths resolve against base_dir.
PipelineConfig ParsePipelineConfig(std::string_view text,
                                   const std::filesystem::path& base_dir = {});
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);
void ApplyConfigOverride(PipelineConfig& cfg, std::string_view key, std::string_view value,
                         const std::filesystem::path& base_dir = {});
std::string RenderPipelineConfig(const PipelineConfig& cfg);

struct StageCheck {
  std::string name;
  bool ok = false;
};

struct RunReport {
  PipelineMode mode = PipelineMode::kPrivCode;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::size_t sensitive_size = 0;
  std::size_t synthesized_size = 0;  // |D|
  std::size_t executed_size = 0;     // |D_e|
  std::size_t filtered_size = 0;     // |D_f|
  std::optional<ValidationStats> exec_stats;
  std::vector<PrivacyReport> privacy;
  EvalReport eval;
  std::optional<LeakageReport> leakage;
  std::map<std::string, std::string> config_echo;
  std::vector<StageCheck> checks;
  std::map<std::string, double> timings_sec;  // written to a separate file

  bool AllChecksPass() const;
};

nlohmann::json RunReportToJson(const RunReport& report);  // excludes timings
nlohmann::json PrivacyReportToJson(const PrivacyReport& report);
nlohmann::json EvalReportToJson(const EvalReport& report);
nlohmann::json LeakageReportToJson(const LeakageReport& report);
nlohmann::json ValidationStatsToJson(const ValidationStats& stats);

// Output files inside cfg.out_dir.
namespace artifacts {
inline constexpr const char* kJuniorCheckpoint = "junior.ckpt";
inline constexpr const char* kPremiumCheckpoint = "premium.ckpt";
inline constexpr const char* kPrivacyReport = "privacy.json";
inline constexpr const char* kSynthesized = "synth.jsonl";
inline constexpr const char* kExecuted = "exec.jsonl";
inline constexpr const char* kFiltered = "filtered.jsonl";
inline constexpr const char* kMaskedCorpus = "masked.jsonl";
inline constexpr const char* kEvalReport = "eval.json";
inline constexpr const char* kLeakageReport = "leakage.json";
inline constexpr const char* kRunReport = "run_report.json";
inline constexpr const char* kTimings = "timings.json";
}  // namespace artifacts

// Pretrains a fresh model on the public code corpus.
LmParams PretrainPublic(const LmConfig& config, const Dataset& public_code,
                        const PlainTrainConfig& cfg);

// Resolves the DP noise scale against target_epsilon when that is positive.
DpConfig ResolveDpConfig(const PipelineConfig& cfg);

RunReport RunPrivcode(const PipelineConfig& cfg);
RunReport RunBaseline(const PipelineConfig& cfg);
RunReport RunPipeline(const PipelineConfig& cfg);  // dispatches on cfg.mode

}  // namespace privforge

#endif  // PRIVFORGE_PIPELINE_H_
