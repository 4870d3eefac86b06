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

#include "privforge/evaluation.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "privforge/error.h"

namespace privforge {
namespace {

std::string RequireString(const nlohmann::json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::kMissingField, where + ": missing `" + key + "`");
  if (!it->is_string()) throw Error(ErrorCode::kParseError, where + ": `" + key + "` is not a string");
  return it->get<std::string>();
}

nlohmann::json ParseJsonArray(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::kParseError, "expected a JSON array");
  return j;
}

// Names called by an expression such as "add(1, 2)".
void CollectCallees(const minilang::SyntaxNode& node, std::set<std::string>& out) {
  if (node.kind == minilang::NodeKind::kCall) out.insert(node.name);
  for (const auto& child : node.children) CollectCallees(child, out);
}

std::string LastLine(const std::string& text) {
  const std::size_t nl = text.rfind('\n');
  return nl == std::string::npos ? text : text.substr(nl + 1);
}

}  // namespace

std::vector<BenchmarkTask> ParseBenchmarkTasks(std::string_view json_text) {
  const nlohmann::json arr = ParseJsonArray(json_text);
  std::vector<BenchmarkTask> tasks;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "task " + std::to_string(i);
    BenchmarkTask task;
    task.task_id = RequireString(arr[i], "task_id", where);
    task.prompt = RequireString(arr[i], "prompt", where);
    if (!arr[i].contains("tests") || !arr[i]["tests"].is_array()) {
      throw Error(ErrorCode::kMissingField, where + ": missing `tests`");
    }
    for (const auto& t : arr[i]["tests"]) {
      task.tests.push_back({RequireString(t, "call", where), RequireString(t, "expected", where)});
    }
    if (arr[i].contains("reference")) task.reference = RequireString(arr[i], "reference", where);
    if (task.tests.empty()) throw Error(ErrorCode::kInvalidArgument, where + ": no tests");
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<BenchmarkTask> LoadBenchmarkTasks(const std::filesystem::path& path) {
  return ParseBenchmarkTasks(ReadFile(path));
}

std::string_view TaskOutcomeName(TaskOutcome o) {
  switch (o) {
    case TaskOutcome::kCompileFail: return "compile_fail";
    case TaskOutcome::kTestFail: return "test_fail";
    case TaskOutcome::kPass: return "pass";
  }
  return "?";
}

TaskResult EvaluateSnippet(const BenchmarkTask& task, std::string_view source,
                           const minilang::ExecBudget& budget) {
  TaskResult result;
  result.task_id = task.task_id;
  if (minilang::IsBlankSource(source) || minilang::LooksForeign(source)) return result;
  const minilang::ParseResult parsed = minilang::Parse(source);
  if (!parsed.ok()) return result;

  const auto defined = minilang::DefinedFunctions(parsed.tree());
  std::set<std::string> needed;
  for (const auto& test : task.tests) {
    const minilang::ParseResult call = minilang::Parse(test.call);
    if (call.ok()) CollectCallees(call.tree(), needed);
  }
  for (const auto& name : needed) {
    if (std::find(defined.begin(), defined.end(), name) == defined.end()) return result;
  }

  for (const auto& test : task.tests) {
    const minilang::ExecResult run = minilang::InterpretWithProbe(source, test.call, budget);
    if (run.status == minilang::ExecStatus::kMissingCapability) {
      // Dependency failures stop the program before any test runs.
      result.tests_run = 0;
      result.tests_failed = 0;
      return result;
    }
    ++result.tests_run;
    if (run.status != minilang::ExecStatus::kOk || LastLine(run.stdout_text) != test.expected) {
      ++result.tests_failed;
    }
  }
  result.outcome = result.tests_failed == 0 ? TaskOutcome::kPass : TaskOutcome::kTestFail;
  return result;
}

EvalReport MakeEvalReport(std::vector<TaskResult> results) {
  EvalReport report;
  std::size_t compiled = 0, passed = 0;
  for (const auto& r : results) {
    if (r.outcome != TaskOutcome::kCompileFail) ++compiled;
    if (r.outcome == TaskOutcome::kPass) ++passed;
  }
  const double n = static_cast<double>(results.size());
  if (!results.empty()) {
    report.pass_at_1 = static_cast<double>(passed) / n;
    report.compile_pass_rate = static_cast<double>(compiled) / n;
  }
  report.execution_pass_rate =
      compiled == 0 ? 0.0 : static_cast<double>(passed) / static_cast<double>(compiled);
  report.tasks = std::move(results);
  return report;
}

EvalReport EvaluateSnippets(std::span<const BenchmarkTask> tasks,
                            std::span<const std::string> snippets,
                            const minilang::ExecBudget& budget) {
  if (tasks.size() != snippets.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one snippet per task required");
  }
  std::vector<TaskResult> results(tasks.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    results[idx] = EvaluateSnippet(tasks[idx], snippets[idx], budget);
  }
  return MakeEvalReport(std::move(results));
}

EvalReport RunBenchmark(const LmParams& params, std::span<const BenchmarkTask> tasks,
                        int max_tokens, const minilang::ExecBudget& budget) {
  if (tasks.empty()) throw Error(ErrorCode::kInvalidArgument, "no benchmark tasks");
  SamplingConfig greedy;
  greedy.strategy = DecodeStrategy::kGreedy;
  greedy.max_tokens = max_tokens;
  std::vector<std::string> snippets(tasks.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    snippets[idx] = Generate(params, tasks[idx].prompt, greedy).snippet.source;
  }
  return EvaluateSnippets(tasks, snippets, budget);
}

std::string_view PiiCategoryName(PiiCategory c) {
  switch (c) {
    case PiiCategory::kEmail: return "Email";
    case PiiCategory::kName: return "Name";
    case PiiCategory::kIpAddress: return "IpAddress";
    case PiiCategory::kPassword: return "Password";
    case PiiCategory::kUsername: return "Username";
  }
  return "?";
}

PiiCategory ParsePiiCategory(std::string_view name) {
  for (int i = 0; i < kNumPiiCategories; ++i) {
    const auto c = static_cast<PiiCategory>(i);
    if (PiiCategoryName(c) == name) return c;
  }
  throw Error(ErrorCode::kParseError, "unknown PII category `" + std::string(name) + "`");
}

std::vector<CanarySpec> ParseCanarySpecs(std::string_view json_text) {
  const nlohmann::json arr = ParseJsonArray(json_text);
  std::vector<CanarySpec> specs;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "canary " + std::to_string(i);
    CanarySpec spec;
    spec.category = ParsePiiCategory(RequireString(arr[i], "category", where));
    spec.pii_string = RequireString(arr[i], "pii", where);
    spec.sample.prompt = RequireString(arr[i], "prompt", where);
    spec.sample.snippet.source = RequireString(arr[i], "code", where);
    spec.repetition_rate = arr[i].value("repetition", 1);
    if (spec.pii_string.empty()) throw Error(ErrorCode::kInvalidArgument, where + ": empty pii");
    if (spec.sample.snippet.source.find(spec.pii_string) == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, where + ": pii not in the canary code");
    }
    if (spec.repetition_rate < 0) throw Error(ErrorCode::kInvalidArgument, where + ": negative repetition");
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<CanarySpec> LoadCanarySpecs(const std::filesystem::path& path) {
  return ParseCanarySpecs(ReadFile(path));
}

std::size_t CountOccurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

Dataset InjectCanaries(const Dataset& ds, std::span<const CanarySpec> specs, std::uint64_t seed) {
  for (const auto& spec : specs) {
    for (const auto& pair : ds.pairs) {
      if (CountOccurrences(pair.snippet.source, spec.pii_string) > 0 ||
          CountOccurrences(pair.prompt, spec.pii_string) > 0) {
        throw Error(ErrorCode::kPiiCollision,
                    std::string(PiiCategoryName(spec.category)) + " canary already occurs in the dataset");
      }
    }
  }
  std::vector<const PromptCodePair*> copies;
  for (const auto& spec : specs) {
    for (int r = 0; r < spec.repetition_rate; ++r) copies.push_back(&spec.sample);
  }
  const std::size_t total = ds.size() + copies.size();
  std::vector<std::size_t> slots(total);
  std::iota(slots.begin(), slots.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(slots.begin(), slots.end(), rng);
  std::vector<bool> is_canary(total, false);
  for (std::size_t i = 0; i < copies.size(); ++i) is_canary[slots[i]] = true;

  Dataset out;
  out.id = ds.id + ".canaries";
  out.pairs.reserve(total);
  std::size_t next_original = 0, next_copy = 0;
  for (std::size_t pos = 0; pos < total; ++pos) {
    if (is_canary[pos]) {
      out.pairs.push_back(*copies[next_copy++]);
    } else {
      out.pairs.push_back(ds.pairs[next_original++]);
    }
  }
  return out;
}

LeakageReport MeasureLeakage(std::span<const GenerationRecord> generations,
                             std::span<const CanarySpec> specs) {
  LeakageReport report;
  for (const auto& spec : specs) {
    std::int64_t n = 0;
    for (const auto& g : generations) {
      n += static_cast<std::int64_t>(CountOccurrences(g.snippet.source, spec.pii_string));
    }
    report.counts[static_cast<std::size_t>(spec.category)] += n;
  }
  int leaked = 0;
  for (std::int64_t c : report.counts) leaked += c > 0 ? 1 : 0;
  report.leakage_rate = static_cast<double>(leaked) / kNumPiiCategories;
  return report;
}

LeakageReport AuditCanaries(const LmParams& params, std::span<const CanarySpec> specs,
                            int generations, std::uint64_t seed) {
  if (generations < 0) throw Error(ErrorCode::kInvalidArgument, "generations must be >= 0");
  std::vector<std::string> prompts;
  for (const auto& s : specs) prompts.push_back(s.sample.prompt);
  if (prompts.empty() || generations == 0) return MeasureLeakage({}, specs);
  SamplingConfig sampling;
  sampling.strategy = DecodeStrategy::kTemperature;
  sampling.temperature = 1.0;
  sampling.seed = seed;
  const int n = static_cast<int>(prompts.size());
  const auto records = BatchGenerate(params, prompts, sampling, (generations + n - 1) / n);
  return MeasureLeakage(records, specs);
}

}  // namespace privforge
