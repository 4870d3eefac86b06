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

#include <set>
#include <string>
#include <vector>

#include "privforge/error.h"
#include "privforge/minilang.h"

namespace privforge::minilang {
namespace {

struct Shape {
  std::vector<std::string> function_clauses;
  int loops = 0;
  int conditionals = 0;
  bool returns_value = false;
  bool prints = false;
  std::set<std::string> bound;
  std::set<std::string> read;
};

std::string Plural(int n, std::string_view noun) {
  std::string s = std::to_string(n) + " " + std::string(noun);
  if (n != 1) s += "s";
  return s;
}

void Walk(const SyntaxNode& node, Shape& shape) {
  switch (node.kind) {
    case NodeKind::kFunctionDef:
      shape.function_clauses.push_back("defines function " + node.name + " with " +
                                       Plural(static_cast<int>(node.params.size()), "parameter"));
      shape.bound.insert(node.name);
      shape.bound.insert(node.params.begin(), node.params.end());
      break;
    case NodeKind::kFor:
      ++shape.loops;
      shape.bound.insert(node.name);
      break;
    case NodeKind::kWhile:
      ++shape.loops;
      break;
    case NodeKind::kIf:
      ++shape.conditionals;
      break;
    case NodeKind::kReturn:
      if (!node.children.empty()) shape.returns_value = true;
      break;
    case NodeKind::kPrint:
      shape.prints = true;
      break;
    case NodeKind::kAssign:
      shape.bound.insert(node.name);
      break;
    case NodeKind::kName:
      shape.read.insert(node.name);
      break;
    default:
      break;
  }
  for (const auto& child : node.children) Walk(child, shape);
}

}  // namespace

std::string SummarizeAst(std::string_view source) {
  ParseResult parsed = Parse(source);
  if (!parsed.ok()) {
    throw Error(ErrorCode::kParseError,
                "offset " + std::to_string(parsed.failure().offset) + ": expected " +
                    parsed.failure().expected);
  }
  Shape shape;
  Walk(parsed.tree(), shape);

  std::vector<std::string> clauses = shape.function_clauses;
  std::vector<std::string> counts;
  if (shape.loops > 0) counts.push_back(Plural(shape.loops, "loop"));
  if (shape.conditionals > 0) counts.push_back(Plural(shape.conditionals, "conditional"));
  if (!counts.empty()) {
    std::string c = "contains " + counts[0];
    for (std::size_t i = 1; i < counts.size(); ++i) c += ", " + counts[i];
    clauses.push_back(std::move(c));
  }
  if (shape.returns_value) clauses.push_back("returns an expression");
  if (shape.prints) clauses.push_back("prints output");

  std::vector<std::string> free_names;
  for (const auto& name : shape.read) {
    if (shape.bound.count(name) == 0) free_names.push_back(name);
  }
  if (!free_names.empty()) {
    std::string c = "reads " + free_names[0];
    for (std::size_t i = 1; i < free_names.size(); ++i) c += ", " + free_names[i];
    clauses.push_back(std::move(c));
  }
  if (clauses.empty()) return "contains only simple statements";

  std::string summary = clauses[0];
  for (std::size_t i = 1; i < clauses.size(); ++i) summary += "; " + clauses[i];
  return summary;
}

}  // namespace privforge::minilang
