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

#include "privforge/minilang.h"

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "privforge/error.h"

namespace privforge::minilang {
namespace {

// A realistic game-bot helper, transliterated to MiniLang.
constexpr const char* kSafeToMove =
    "def is_safe_to_move(dest, loc, closeEnemyLocs):\n"
    "    moveIn = 1\n"
    "    for enemy in range(dest):\n"
    "        if enemy == closeEnemyLocs:\n"
    "            if enemy != loc:\n"
    "                moveIn = 0\n"
    "    return moveIn == 1\n";

const ExecBudget kBudget{};

std::vector<NodeKind> Kinds(const std::vector<StructuralSpan>& spans) {
  std::vector<NodeKind> out;
  for (const auto& s : spans) out.push_back(s.node_kind);
  return out;
}

void CheckSpans(const SyntaxNode& node) {
  std::size_t prev_end = node.span.begin;
  for (const auto& child : node.children) {
    ASSERT_TRUE(node.span.Contains(child.span)) << NodeKindName(node.kind) << " / " << NodeKindName(child.kind);
    ASSERT_LE(prev_end, child.span.begin);
    prev_end = child.span.end;
    CheckSpans(child);
  }
}

TEST(ParseTest, FunctionReturningLiteral) {
  const ParseResult r = Parse("def f():\n    return 1");
  ASSERT_TRUE(r.ok());
  const SyntaxNode& m = r.tree();
  EXPECT_EQ(m.kind, NodeKind::kModule);
  ASSERT_EQ(m.children.size(), 1u);
  const SyntaxNode& f = m.children[0];
  EXPECT_EQ(f.kind, NodeKind::kFunctionDef);
  EXPECT_EQ(f.name, "f");
  ASSERT_EQ(f.children.size(), 1u);
  EXPECT_EQ(f.children[0].kind, NodeKind::kReturn);
  ASSERT_EQ(f.children[0].children.size(), 1u);
  EXPECT_EQ(f.children[0].children[0].kind, NodeKind::kLiteral);
  EXPECT_EQ(m.span, (Span{0, 21}));
}

TEST(ParseTest, MalformedParameterListFailsAtColon) {
  const ParseResult r = Parse("def f(:");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.failure().reason, ParseFailure::Reason::kSyntax);
  EXPECT_EQ(r.failure().offset, 6u);
}

TEST(ParseTest, EmptySource) {
  const ParseResult r = Parse("");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.failure().reason, ParseFailure::Reason::kEmptySource);
}

TEST(ParseTest, BadIndentationAndTabsFail) {
  EXPECT_FALSE(Parse("def f():\n  return 1\n").ok());
  EXPECT_FALSE(Parse("def f():\n\treturn 1\n").ok());
  EXPECT_FALSE(Parse("if 1:\nx = 2\n").ok());
}

TEST(ParseTest, IfElseAndOperators) {
  const ParseResult r = Parse("if a > 1 and b != 2:\n    x = -a\nelse:\n    x = a % 3\n");
  ASSERT_TRUE(r.ok());
  const SyntaxNode& n = r.tree().children[0];
  EXPECT_EQ(n.kind, NodeKind::kIf);
  EXPECT_EQ(n.else_begin, 2u);
  EXPECT_EQ(n.children.size(), 3u);
}

// Random programs from a small generator; every parse must satisfy the span
// nesting and ordering invariants.
std::string RandomProgram(std::mt19937_64& rng, int depth, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
  std::string out;
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < n; ++i) {
    const int kind = depth > 2 ? static_cast<int>(rng() % 3) : static_cast<int>(rng() % 7);
    const std::string v = std::string(1, static_cast<char>('a' + rng() % 5));
    switch (kind) {
      case 0: out += pad + v + " = " + std::to_string(rng() % 100) + " + (" + v + " * 2)\n"; break;
      case 1: out += pad + "print(" + v + " - 1)\n"; break;
      case 2: out += pad + "return " + v + "\n"; break;
      case 3: out += pad + "if " + v + " > 3:\n" + RandomProgram(rng, depth + 1, indent + 1);
              if (rng() % 2) out += pad + "else:\n" + RandomProgram(rng, depth + 1, indent + 1);
              break;
      case 4: out += pad + "for i in range(" + v + "):\n" + RandomProgram(rng, depth + 1, indent + 1); break;
      case 5: out += pad + "while " + v + " < 10:\n" + RandomProgram(rng, depth + 1, indent + 1); break;
      default: out += pad + "def g" + v + "(x, y):\n" + RandomProgram(rng, depth + 1, indent + 1); break;
    }
  }
  return out;
}

TEST(ParseTest, SpanInvariantsOnRandomPrograms) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string src = RandomProgram(rng, 0, 0);
    const ParseResult r = Parse(src);
    ASSERT_TRUE(r.ok()) << src;
    EXPECT_EQ(r.tree().span, (Span{0, src.size()}));
    CheckSpans(r.tree());
    for (const auto& s : ExtractStructuralTokens(src)) {
      ASSERT_EQ(s.tokens, src.substr(s.span.begin, s.span.size()));
      ASSERT_TRUE(IsStructural(s.node_kind));
    }
  }
}

TEST(StructuralTest, FunctionAndReturn) {
  const auto spans = ExtractStructuralTokens("def f():\n    return 1");
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].node_kind, NodeKind::kFunctionDef);
  EXPECT_EQ(spans[0].tokens, "def f():\n    return 1");
  EXPECT_EQ(spans[1].node_kind, NodeKind::kReturn);
  EXPECT_EQ(spans[1].tokens, "return 1");
}

TEST(StructuralTest, AssignmentHasNone) { EXPECT_TRUE(ExtractStructuralTokens("x = 1").empty()); }

TEST(StructuralTest, SafeToMoveOrder) {
  const auto spans = ExtractStructuralTokens(kSafeToMove);
  EXPECT_EQ(Kinds(spans), (std::vector<NodeKind>{NodeKind::kFunctionDef, NodeKind::kFor, NodeKind::kIf,
                                                 NodeKind::kIf, NodeKind::kReturn}));
  EXPECT_EQ(spans[4].tokens, "return moveIn == 1");
}

TEST(StructuralTest, UnparsableSourceThrows) {
  try {
    ExtractStructuralTokens("def (");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
}

TEST(InterpretTest, HandEvaluatedPrograms) {
  const ExecResult r = Interpret("x = 2\nprint(x * 3)", kBudget);
  EXPECT_EQ(r.status, ExecStatus::kOk);
  EXPECT_EQ(r.stdout_text, "6");
  EXPECT_EQ(Interpret("print(7 / 2)\nprint(-7 / 2)\nprint(-7 % 3)", kBudget).stdout_text, "3\n-4\n2");
  EXPECT_EQ(Interpret("print(\"a\" + \"b\")", kBudget).stdout_text, "ab");
  EXPECT_EQ(Interpret("def f(n):\n    if n < 2:\n        return n\n    return f(n - 1) + f(n - 2)\nprint(f(10))",
                      kBudget).stdout_text,
            "55");
}

TEST(InterpretTest, FaultsAreData) {
  EXPECT_EQ(Interpret("print(y)", kBudget).status, ExecStatus::kUndefinedName);
  EXPECT_EQ(Interpret("print(1 / 0)", kBudget).status, ExecStatus::kDivisionByZero);
  EXPECT_EQ(Interpret("print(1 + \"a\")", kBudget).status, ExecStatus::kTypeFault);
  EXPECT_EQ(Interpret("while 1:\n    x = 1", ExecBudget{1000, 4096}).status, ExecStatus::kStepLimitExceeded);
  EXPECT_EQ(Interpret("def f(:", kBudget).status, ExecStatus::kParseFailure);
  EXPECT_EQ(Interpret("  \n# only a comment\n", kBudget).status, ExecStatus::kEmptySource);
  EXPECT_EQ(Interpret("int main() { return 0; }", kBudget).status, ExecStatus::kForeignSyntax);
  EXPECT_EQ(Interpret("require(\"network\")\nprint(1)", kBudget).status, ExecStatus::kMissingCapability);
  EXPECT_EQ(Interpret("require(\"math\")\nprint(1)", kBudget).status, ExecStatus::kOk);
}

TEST(InterpretTest, StepsStayWithinBudget) {
  const ExecBudget b{500, 4096};
  const ExecResult r = Interpret("x = 0\nwhile x < 100000:\n    x = x + 1", b);
  EXPECT_EQ(r.status, ExecStatus::kStepLimitExceeded);
  EXPECT_LE(r.steps_used, b.max_steps);
}

TEST(InterpretTest, Deterministic) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const std::string src = RandomProgram(rng, 0, 0);
    EXPECT_EQ(Interpret(src, kBudget), Interpret(src, kBudget));
  }
}

TEST(InterpretTest, ProbeAppendsValue) {
  const ExecResult r = InterpretWithProbe("def add(a, b):\n    return a + b\nprint(0)", "add(2, 3)", kBudget);
  EXPECT_EQ(r.status, ExecStatus::kOk);
  EXPECT_EQ(r.stdout_text, "0\n5");
}

TEST(SummaryTest, TemplateOutputs) {
  EXPECT_EQ(SummarizeAst("def add(a, b):\n    return a + b"),
            "defines function add with 2 parameters; returns an expression");
  EXPECT_EQ(SummarizeAst("for i in range(3):\n    print(i)"), "contains 1 loop; prints output");
  EXPECT_EQ(SummarizeAst("x = 1"), "contains only simple statements");
  EXPECT_EQ(SummarizeAst("print(limit)"), "prints output; reads limit");
}

TEST(SummaryTest, SafeToMoveCounts) {
  const std::string s = SummarizeAst(kSafeToMove);
  for (const char* needle : {"defines function is_safe_to_move", "1 loop", "2 conditionals", "returns"}) {
    EXPECT_NE(s.find(needle), std::string::npos) << needle << " in " << s;
  }
  EXPECT_EQ(SummarizeAst(kSafeToMove), s);
}

TEST(DefinedFunctionsTest, TopLevelOnlyInOrder) {
  const ParseResult r = Parse("def b():\n    return 1\ndef a(x):\n    def inner():\n        return 2\n    return x\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(DefinedFunctions(r.tree()), (std::vector<std::string>{"b", "a"}));
}

}  // namespace
}  // namespace privforge::minilang
