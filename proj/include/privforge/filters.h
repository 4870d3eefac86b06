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

#ifndef PRIVFORGE_FILTERS_H_
#define PRIVFORGE_FILTERS_H_

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "privforge/corpus.h"
#include "privforge/minilang.h"

namespace privforge {

enum class ExecCategory {
  kPass,
  kEnvironmentError,
  kCompileError,
  kRuntimeError,
  kLanguageMismatch,
  kOther,
};

enum class OtherReason { kNone, kEmpty, kTimeout, kUnspecified };

struct ExecutionOutcome {
  ExecCategory category = ExecCategory::kPass;
  OtherReason other = OtherReason::kNone;

  bool operator==(const ExecutionOutcome&) const = default;
};

std::string_view ExecCategoryName(ExecCategory c);
std::string ExecutionOutcomeName(const ExecutionOutcome& o);

// Maps an interpreter status onto the failure taxonomy.
ExecutionOutcome OutcomeFromStatus(minilang::ExecStatus status);

// Precedence when several signals apply:
// Empty > LanguageMismatch > Compile > Environment > Runtime > Timeout.
ExecutionOutcome ClassifyExecution(const CodeSnippet& snippet, const minilang::ExecBudget& budget);

struct ValidationStats {
  std::size_t total = 0;
  std::size_t pass = 0;
  std::size_t environment_error = 0;
  std::size_t compile_error = 0;
  std::size_t runtime_error = 0;
  std::size_t language_mismatch = 0;
  std::size_t other_empty = 0;
  std::size_t other_timeout = 0;
  std::size_t other_unspecified = 0;

  double acceptance_rate() const {
    return total == 0 ? 0.0 : static_cast<double>(pass) / static_cast<double>(total);
  }
  std::size_t other() const { return other_empty + other_timeout + other_unspecified; }
  void Add(const ExecutionOutcome& o);
};

struct ExecutionFilterResult {
  Dataset kept;
  ValidationStats stats;
  std::vector<ExecutionOutcome> outcomes;  // one per input record
};

ExecutionFilterResult ExecutionValidate(const Dataset& ds, const minilang::ExecBudget& budget);

struct SimilarityScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Greedy max-cosine matching between words represented as character-trigram
// count vectors ("#word#" padded, lowercased). Throws kEmptyText when either
// side has no words.
SimilarityScore TokenMatchSimilarity(std::string_view a, std::string_view b);

struct RoundTripConfig {
  double threshold = 0.88;
  int summaries_per_snippet = 1;
};

// Produces summary number `index` for a snippet.
using Summarizer = std::function<std::string(const std::string& source, int index)>;

Summarizer AstSummarizer();

struct RoundTripResult {
  Dataset kept;
  std::vector<SimilarityScore> scores;  // best over summaries, one per input record
};

// Keeps pairs whose best summary-vs-prompt f1 is strictly above the threshold.
RoundTripResult RoundTripValidate(const Dataset& ds, const RoundTripConfig& cfg,
                                  const Summarizer& summarizer = AstSummarizer());

}  // namespace privforge

#endif  // PRIVFORGE_FILTERS_H_
