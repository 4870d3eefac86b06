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

#ifndef PRIVFORGE_EVALUATION_H_
#define PRIVFORGE_EVALUATION_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privforge/corpus.h"
#include "privforge/lm.h"
#include "privforge/minilang.h"
#include "privforge/synth.h"

namespace privforge {

struct BenchmarkTest {
  std::string call;      // expression evaluated after the snippet runs
  std::string expected;  // its printed value
};

struct BenchmarkTask {
  std::string task_id;
  std::string prompt;
  std::vector<BenchmarkTest> tests;
  std::string reference;  // optional known-good solution
};

std::vector<BenchmarkTask> ParseBenchmarkTasks(std::string_view json_text);
std::vector<BenchmarkTask> LoadBenchmarkTasks(const std::filesystem::path& path);

// Status rules: a snippet that does not compile runs no tests; a compiled
// snippet passes only when every test passes.
enum class TaskOutcome { kCompileFail, kTestFail, kPass };

std::string_view TaskOutcomeName(TaskOutcome o);

struct TaskResult {
  std::string task_id;
  TaskOutcome outcome = TaskOutcome::kCompileFail;
  int tests_run = 0;
  int tests_failed = 0;
};

struct EvalReport {
  double pass_at_1 = 0.0;
  double compile_pass_rate = 0.0;
  double execution_pass_rate = 0.0;  // over compiled tasks
  std::vector<TaskResult> tasks;
};

// Compiles when the snippet parses, passes the language and capability checks,
// and defines every function the tests call.
TaskResult EvaluateSnippet(const BenchmarkTask& task, std::string_view source,
                           const minilang::ExecBudget& budget);

EvalReport MakeEvalReport(std::vector<TaskResult> results);

EvalReport EvaluateSnippets(std::span<const BenchmarkTask> tasks,
                            std::span<const std::string> snippets,
                            const minilang::ExecBudget& budget);

// One greedy generation per task, then EvaluateSnippets.
EvalReport RunBenchmark(const LmParams& params, std::span<const BenchmarkTask> tasks,
                        int max_tokens, const minilang::ExecBudget& budget);

enum class PiiCategory { kEmail, kName, kIpAddress, kPassword, kUsername };
inline constexpr int kNumPiiCategories = 5;

std::string_view PiiCategoryName(PiiCategory c);
PiiCategory ParsePiiCategory(std::string_view name);

struct CanarySpec {
  PiiCategory category = PiiCategory::kEmail;
  std::string pii_string;
  PromptCodePair sample;
  int repetition_rate = 1;
};

std::vector<CanarySpec> ParseCanarySpecs(std::string_view json_text);
std::vector<CanarySpec> LoadCanarySpecs(const std::filesystem::path& path);

// Inserts repetition_rate copies of each canary at seed-determined positions;
// original records keep their relative order. Throws kPiiCollision when a
// pii_string already occurs in the dataset.
Dataset InjectCanaries(const Dataset& ds, std::span<const CanarySpec> specs, std::uint64_t seed);

struct LeakageReport {
  std::array<std::int64_t, kNumPiiCategories> counts{};
  double leakage_rate = 0.0;
};

// Exact substring counting of each pii_string across generated snippets.
LeakageReport MeasureLeakage(std::span<const GenerationRecord> generations,
                             std::span<const CanarySpec> specs);

// Samples `generations` Temperature(1) completions spread evenly over the
// canary prompts and counts verbatim PII reproductions.
LeakageReport AuditCanaries(const LmParams& params, std::span<const CanarySpec> specs,
                            int generations, std::uint64_t seed);

std::size_t CountOccurrences(std::string_view haystack, std::string_view needle);

}  // namespace privforge

#endif  // PRIVFORGE_EVALUATION_H_
