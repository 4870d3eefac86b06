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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

#include "privforge/error.h"
#include "privforge/filters.h"

namespace privforge {
namespace {

BenchmarkTask AddTask() {
  return {"t/add", "defines function add with 2 parameters", {{"add(1, 2)", "3"}, {"add(-4, 4)", "0"}}};
}

TEST(EvaluateSnippetTest, Pass) {
  const TaskResult r = EvaluateSnippet(AddTask(), "def add(a, b):\n    return a + b\n", {});
  EXPECT_EQ(r.outcome, TaskOutcome::kPass);
  EXPECT_EQ(r.tests_run, 2);
  EXPECT_EQ(r.tests_failed, 0);
}

TEST(EvaluateSnippetTest, WrongAnswerIsTestFail) {
  const TaskResult r = EvaluateSnippet(AddTask(), "def add(a, b):\n    return a - b\n", {});
  EXPECT_EQ(r.outcome, TaskOutcome::kTestFail);
  EXPECT_EQ(r.tests_run, 2);
  EXPECT_EQ(r.tests_failed, 2);
}

TEST(EvaluateSnippetTest, RuntimeFaultInOneTestIsTestFail) {
  const TaskResult r = EvaluateSnippet(AddTask(), "def add(a, b):\n    return a + b + 12 / (a + 4)\n", {});
  EXPECT_EQ(r.outcome, TaskOutcome::kTestFail);
  EXPECT_EQ(r.tests_failed, 2);
}

TEST(EvaluateSnippetTest, CompileFailures) {
  for (std::string_view src : {"", "def add(a, b:\n    return a\n", "def plus(a, b):\n    return a + b\n",
                               "function add(a, b) { return a + b; }\n",
                               "require(\"numpy\")\ndef add(a, b):\n    return a + b\n"}) {
    const TaskResult r = EvaluateSnippet(AddTask(), src, {});
    EXPECT_EQ(r.outcome, TaskOutcome::kCompileFail) << src;
    // A compile failure runs no tests, so it never carries failed tests.
    EXPECT_EQ(r.tests_run, 0);
    EXPECT_EQ(r.tests_failed, 0);
  }
}

TEST(EvalReportTest, CraftedFixtures) {
  using O = TaskOutcome;
  auto make = [](std::vector<O> os) {
    std::vector<TaskResult> rs;
    for (O o : os) rs.push_back({"t", o, 1, o == O::kTestFail ? 1 : 0});
    return MakeEvalReport(rs);
  };
  const EvalReport a = make({O::kPass, O::kTestFail, O::kCompileFail, O::kCompileFail});
  EXPECT_DOUBLE_EQ(a.pass_at_1, 0.25);
  EXPECT_DOUBLE_EQ(a.compile_pass_rate, 0.5);
  EXPECT_DOUBLE_EQ(a.execution_pass_rate, 0.5);
  const EvalReport none = make({O::kCompileFail, O::kCompileFail});
  EXPECT_EQ(none.pass_at_1, 0.0);
  EXPECT_EQ(none.compile_pass_rate, 0.0);
  EXPECT_EQ(none.execution_pass_rate, 0.0);
  const EvalReport empty = make({});
  EXPECT_EQ(empty.pass_at_1, 0.0);
  const EvalReport all = make({O::kPass, O::kPass, O::kPass});
  EXPECT_DOUBLE_EQ(all.pass_at_1, 1.0);
  EXPECT_DOUBLE_EQ(all.execution_pass_rate, 1.0);
}

TEST(EvalReportTest, RandomOutcomeIdentities) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TaskResult> rs(1 + rng() % 40);
    for (auto& r : rs) r.outcome = static_cast<TaskOutcome>(rng() % 3);
    const EvalReport e = MakeEvalReport(rs);
    ASSERT_LE(e.pass_at_1, e.compile_pass_rate);
    if (e.compile_pass_rate > 0) {
      ASSERT_NEAR(e.execution_pass_rate, e.pass_at_1 / e.compile_pass_rate, 1e-12);
    } else {
      ASSERT_EQ(e.execution_pass_rate, 0.0);
    }
  }
}

TEST(EvaluateSnippetsTest, NeedsOneSnippetPerTask) {
  const std::vector<BenchmarkTask> tasks{AddTask()};
  EXPECT_THROW(EvaluateSnippets(tasks, std::vector<std::string>{}, {}), Error);
  const EvalReport r = EvaluateSnippets(tasks, std::vector<std::string>{"def add(a, b):\n    return b + a\n"}, {});
  EXPECT_DOUBLE_EQ(r.pass_at_1, 1.0);
}

TEST(BenchmarkTest, ParseErrors) {
  EXPECT_THROW(ParseBenchmarkTasks("{}"), Error);
  EXPECT_THROW(ParseBenchmarkTasks("[{\"task_id\": \"a\"}]"), Error);
  EXPECT_THROW(ParseBenchmarkTasks("[{\"task_id\": \"a\", \"prompt\": \"p\", \"tests\": []}]"), Error);
  const auto t = ParseBenchmarkTasks(
      "[{\"task_id\": \"a\", \"prompt\": \"p\", \"tests\": [{\"call\": \"f()\", \"expected\": \"1\"}]}]");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].tests[0].call, "f()");
}

TEST(BenchmarkTest, BundledReferenceSolutionsPass) {
  const auto tasks = LoadBenchmarkTasks(std::string(PRIVFORGE_DATA_DIR) + "/benchmark.json");
  ASSERT_EQ(tasks.size(), 30u);
  std::vector<std::string> refs;
  for (const auto& t : tasks) {
    ASSERT_FALSE(t.reference.empty()) << t.task_id;
    refs.push_back(t.reference);
  }
  const EvalReport r = EvaluateSnippets(tasks, refs, {});
  EXPECT_DOUBLE_EQ(r.pass_at_1, 1.0);
  // Each reference would survive the default round-trip filter.
  for (const auto& t : tasks) {
    EXPECT_GT(TokenMatchSimilarity(t.prompt, minilang::SummarizeAst(t.reference)).f1, 0.88) << t.task_id;
  }
}

TEST(CanaryTest, BundledSpecsCoverEveryCategory) {
  const auto specs = LoadCanarySpecs(std::string(PRIVFORGE_DATA_DIR) + "/canaries.json");
  ASSERT_EQ(specs.size(), 5u);
  std::set<PiiCategory> cats;
  for (const auto& s : specs) {
    cats.insert(s.category);
    EXPECT_NE(s.sample.snippet.source.find(s.pii_string), std::string::npos);
    EXPECT_EQ(ParsePiiCategory(PiiCategoryName(s.category)), s.category);
  }
  EXPECT_EQ(cats.size(), 5u);
}

TEST(CanaryTest, ParseRejectsBadSpecs) {
  EXPECT_THROW(ParseCanarySpecs("[{\"category\": \"Phone\", \"pii\": \"1\", \"prompt\": \"p\", \"code\": \"1\"}]"),
               Error);
  EXPECT_THROW(ParseCanarySpecs("[{\"category\": \"Email\", \"pii\": \"a@b\", \"prompt\": \"p\", \"code\": \"x\"}]"),
               Error);
}

Dataset Originals(int n) {
  Dataset ds;
  ds.id = "orig";
  for (int i = 0; i < n; ++i) {
    PromptCodePair p;
    p.prompt = "p" + std::to_string(i);
    p.snippet.source = "x = " + std::to_string(i) + "\n";
    ds.pairs.push_back(p);
  }
  return ds;
}

CanarySpec Canary(PiiCategory c, std::string pii, int rep) {
  CanarySpec s;
  s.category = c;
  s.pii_string = pii;
  s.sample.prompt = "canary";
  s.sample.snippet.source = "k = \"" + pii + "\"\n";
  s.repetition_rate = rep;
  return s;
}

TEST(InjectTest, SizeOrderAndDeterminism) {
  const Dataset ds = Originals(200);
  const std::vector<CanarySpec> specs{Canary(PiiCategory::kEmail, "q@z.io", 100),
                                      Canary(PiiCategory::kName, "Ada Q", 3)};
  const Dataset out = InjectCanaries(ds, specs, 1);
  ASSERT_EQ(out.size(), 303u);
  EXPECT_EQ(out.pairs, InjectCanaries(ds, specs, 1).pairs);
  EXPECT_NE(out.pairs, InjectCanaries(ds, specs, 2).pairs);
  std::vector<PromptCodePair> originals;
  std::size_t email = 0;
  for (const auto& p : out.pairs) {
    if (p.prompt == "canary") {
      email += CountOccurrences(p.snippet.source, "q@z.io");
    } else {
      originals.push_back(p);
    }
  }
  EXPECT_EQ(email, 100u);
  EXPECT_EQ(originals, ds.pairs);
}

TEST(InjectTest, CollisionRejected) {
  Dataset ds = Originals(3);
  ds.pairs[1].snippet.source = "mail = \"q@z.io\"\n";
  try {
    InjectCanaries(ds, std::vector<CanarySpec>{Canary(PiiCategory::kEmail, "q@z.io", 1)}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPiiCollision);
  }
}

TEST(LeakageTest, CountsAndRate) {
  const std::vector<CanarySpec> specs{Canary(PiiCategory::kEmail, "q@z.io", 1),
                                      Canary(PiiCategory::kIpAddress, "10.1.2.3", 1)};
  std::vector<GenerationRecord> gens(3);
  gens[0].snippet.source = "q@z.io q@z.io";
  gens[1].snippet.source = "10.1.2.";
  gens[2].snippet.source = "x = \"q@z.io\"";
  const LeakageReport r = MeasureLeakage(gens, specs);
  EXPECT_EQ(r.counts[static_cast<int>(PiiCategory::kEmail)], 3);
  EXPECT_EQ(r.counts[static_cast<int>(PiiCategory::kIpAddress)], 0);
  EXPECT_DOUBLE_EQ(r.leakage_rate, 0.2);
  EXPECT_EQ(MeasureLeakage({}, specs).leakage_rate, 0.0);
}

TEST(LeakageTest, CountOccurrencesNonOverlapping) {
  EXPECT_EQ(CountOccurrences("aaaa", "aa"), 2u);
  EXPECT_EQ(CountOccurrences("abc", ""), 0u);
  EXPECT_EQ(CountOccurrences("", "a"), 0u);
  EXPECT_EQ(CountOccurrences("xabxab", "ab"), 2u);
}

TEST(AuditTest, GenerationBudgetSpreadOverPrompts) {
  const LmParams p = InitParams(LmConfig{Vocabulary::kSize, 4, 4, 6, 1});
  const std::vector<CanarySpec> specs{Canary(PiiCategory::kEmail, "q@z.io", 1)};
  const LeakageReport a = AuditCanaries(p, specs, 5, 3);
  const LeakageReport b = AuditCanaries(p, specs, 5, 3);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(AuditCanaries(p, specs, 0, 3).leakage_rate, 0.0);
  EXPECT_THROW(AuditCanaries(p, specs, -1, 3), Error);
}

}  // namespace
}  // namespace privforge
