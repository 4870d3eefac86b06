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

#include "privforge/filters.h"

#include <algorithm>

#include "privforge/error.h"

namespace privforge {

using minilang::ExecStatus;

std::string_view ExecCategoryName(ExecCategory c) {
  switch (c) {
    case ExecCategory::kPass: return "Pass";
    case ExecCategory::kEnvironmentError: return "EnvironmentError";
    case ExecCategory::kCompileError: return "CompileError";
    case ExecCategory::kRuntimeError: return "RuntimeError";
    case ExecCategory::kLanguageMismatch: return "LanguageMismatch";
    case ExecCategory::kOther: return "Other";
  }
  return "?";
}

std::string ExecutionOutcomeName(const ExecutionOutcome& o) {
  std::string name(ExecCategoryName(o.category));
  switch (o.other) {
    case OtherReason::kNone: break;
    case OtherReason::kEmpty: name += "(Empty)"; break;
    case OtherReason::kTimeout: name += "(Timeout)"; break;
    case OtherReason::kUnspecified: name += "(Unspecified)"; break;
  }
  return name;
}

ExecutionOutcome OutcomeFromStatus(ExecStatus status) {
  switch (status) {
    case ExecStatus::kOk: return {ExecCategory::kPass, OtherReason::kNone};
    case ExecStatus::kEmptySource: return {ExecCategory::kOther, OtherReason::kEmpty};
    case ExecStatus::kForeignSyntax: return {ExecCategory::kLanguageMismatch, OtherReason::kNone};
    case ExecStatus::kParseFailure: return {ExecCategory::kCompileError, OtherReason::kNone};
    case ExecStatus::kMissingCapability: return {ExecCategory::kEnvironmentError, OtherReason::kNone};
    case ExecStatus::kUndefinedName:
    case ExecStatus::kTypeFault:
    case ExecStatus::kDivisionByZero: return {ExecCategory::kRuntimeError, OtherReason::kNone};
    case ExecStatus::kStepLimitExceeded: return {ExecCategory::kOther, OtherReason::kTimeout};
    case ExecStatus::kHostFault: return {ExecCategory::kOther, OtherReason::kUnspecified};
  }
  return {ExecCategory::kOther, OtherReason::kUnspecified};
}

ExecutionOutcome ClassifyExecution(const CodeSnippet& snippet, const minilang::ExecBudget& budget) {
  if (minilang::IsBlankSource(snippet.source)) return {ExecCategory::kOther, OtherReason::kEmpty};
  if (snippet.language != LanguageTag::kMiniLang || minilang::LooksForeign(snippet.source)) {
    return {ExecCategory::kLanguageMismatch, OtherReason::kNone};
  }
  return OutcomeFromStatus(minilang::Interpret(snippet.source, budget).status);
}

void ValidationStats::Add(const ExecutionOutcome& o) {
  ++total;
  switch (o.category) {
    case ExecCategory::kPass: ++pass; break;
    case ExecCategory::kEnvironmentError: ++environment_error; break;
    case ExecCategory::kCompileError: ++compile_error; break;
    case ExecCategory::kRuntimeError: ++runtime_error; break;
    case ExecCategory::kLanguageMismatch: ++language_mismatch; break;
    case ExecCategory::kOther:
      if (o.other == OtherReason::kEmpty) {
        ++other_empty;
      } else if (o.other == OtherReason::kTimeout) {
        ++other_timeout;
      } else {
        ++other_unspecified;
      }
      break;
  }
}

ExecutionFilterResult ExecutionValidate(const Dataset& ds, const minilang::ExecBudget& budget) {
  ExecutionFilterResult result;
  result.kept.id = ds.id + ".exec";
  result.outcomes.resize(ds.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    result.outcomes[idx] = ClassifyExecution(ds.pairs[idx].snippet, budget);
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    result.stats.Add(result.outcomes[i]);
    if (result.outcomes[i].category == ExecCategory::kPass) result.kept.pairs.push_back(ds.pairs[i]);
  }
  return result;
}

Summarizer AstSummarizer() {
  return [](const std::string& source, int /*index*/) { return minilang::SummarizeAst(source); };
}

RoundTripResult RoundTripValidate(const Dataset& ds, const RoundTripConfig& cfg,
                                  const Summarizer& summarizer) {
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be in [0, 1]");
  }
  if (cfg.summaries_per_snippet < 1) {
    throw Error(ErrorCode::kInvalidArgument, "summaries_per_snippet must be >= 1");
  }
  RoundTripResult result;
  result.kept.id = ds.id + ".roundtrip";
  result.scores.resize(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const PromptCodePair& pair = ds.pairs[i];
    SimilarityScore best;
    for (int s = 0; s < cfg.summaries_per_snippet; ++s) {
      SimilarityScore score;
      try {
        score = TokenMatchSimilarity(pair.prompt, summarizer(pair.snippet.source, s));
      } catch (const Error&) {
        // Unsummarizable snippet or empty prompt: scores zero.
      }
      if (score.f1 > best.f1) best = score;
    }
    result.scores[i] = best;
    if (best.f1 > cfg.threshold) result.kept.pairs.push_back(pair);
  }
  return result;
}

}  // namespace privforge
