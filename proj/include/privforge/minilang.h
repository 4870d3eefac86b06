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

#ifndef PRIVFORGE_MINILANG_H_
#define PRIVFORGE_MINILANG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace privforge::minilang {

// Half-open byte range [begin, end) into the source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool Contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
  bool operator==(const Span&) const = default;
};

enum class NodeKind {
  kModule,
  kFunctionDef,
  kIf,
  kFor,
  kWhile,
  kReturn,
  kAssign,
  kExprStmt,
  kCall,
  kBinOp,
  kName,
  kLiteral,
  kPrint,
};

std::string_view NodeKindName(NodeKind kind);

// Block-introducing and flow-control kinds.
bool IsStructural(NodeKind kind);

// Child layout per kind:
//   Module       statements
//   FunctionDef  body statements; `name`, `params`
//   If           condition, then-statements, else-statements (from else_begin)
//   For          range bound expression, body statements; `name` is the loop var
//   While        condition, body statements
//   Return       optional value
//   Assign       value; `name` is the target
//   ExprStmt     expression
//   Print        expression
//   Call         arguments; `name` is the callee
//   BinOp        lhs, rhs (a single child for unary minus); `name` is the operator
//   Name         `name`
//   Literal      `literal`
struct SyntaxNode {
  NodeKind kind = NodeKind::kModule;
  Span span;
  std::vector<SyntaxNode> children;
  std::string name;
  std::vector<std::string> params;
  std::variant<std::int64_t, std::string> literal;
  std::size_t else_begin = 0;  // If only; == children.size() when there is no else
};

struct ParseFailure {
  enum class Reason { kSyntax, kEmptySource };
  Reason reason = Reason::kSyntax;
  std::size_t offset = 0;
  std::string expected;
};

class ParseResult {
 public:
  ParseResult(SyntaxNode root) : value_(std::move(root)) {}  // NOLINT
  ParseResult(ParseFailure failure) : value_(std::move(failure)) {}  // NOLINT

  bool ok() const { return std::holds_alternative<SyntaxNode>(value_); }
  const SyntaxNode& tree() const { return std::get<SyntaxNode>(value_); }
  const ParseFailure& failure() const { return std::get<ParseFailure>(value_); }

 private:
  std::variant<SyntaxNode, ParseFailure> value_;
};

ParseResult Parse(std::string_view source);

// True when the source contains no code tokens (only blank lines, comments,
// or whitespace).
bool IsBlankSource(std::string_view source);

// Heuristic markers of another language: block braces or statement
// semicolons outside string literals, `public static`, `#include`, ...
bool LooksForeign(std::string_view source);

struct StructuralSpan {
  NodeKind node_kind = NodeKind::kModule;
  Span span;
  std::string tokens;  // source[span]
};

// Pre-order (source order) walk. Throws Error(kParseError) when the source
// does not parse.
std::vector<StructuralSpan> ExtractStructuralTokens(std::string_view source);
std::vector<StructuralSpan> ExtractStructuralTokens(std::string_view source,
                                                    const SyntaxNode& tree);

struct ExecBudget {
  std::int64_t max_steps = 10000;
  std::int64_t max_output_bytes = 4096;
};

enum class ExecStatus {
  kOk,
  kParseFailure,
  kUndefinedName,
  kTypeFault,
  kDivisionByZero,
  kStepLimitExceeded,
  kEmptySource,
  kForeignSyntax,
  kMissingCapability,
  kHostFault,
};

std::string_view ExecStatusName(ExecStatus status);

struct ExecResult {
  ExecStatus status = ExecStatus::kOk;
  std::string stdout_text;
  std::int64_t steps_used = 0;
  std::string detail;

  bool operator==(const ExecResult&) const = default;
};

// Capabilities `require(name)` accepts.
const std::vector<std::string>& CapabilityAllowList();

// Runs the program in a fresh environment. Print output is captured, one line
// per print call joined by '\n'. Never touches host state.
ExecResult Interpret(std::string_view source, const ExecBudget& budget);

// Runs `source`, then evaluates `probe` (an expression) in the resulting
// global environment and appends its printed value as the final line.
ExecResult InterpretWithProbe(std::string_view source, std::string_view probe,
                              const ExecBudget& budget);

// Names of functions the program defines at top level, in source order.
std::vector<std::string> DefinedFunctions(const SyntaxNode& tree);

// Deterministic English description of a program's shape. Throws
// Error(kParseError) on unparsable input.
std::string SummarizeAst(std::string_view source);

}  // namespace privforge::minilang

#endif  // PRIVFORGE_MINILANG_H_
