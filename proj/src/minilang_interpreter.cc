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

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <string>
#include <utility>
#include <variant>

#include "privforge/minilang.h"

namespace privforge::minilang {
namespace {

constexpr int kMaxCallDepth = 64;

using Value = std::variant<std::monostate, std::int64_t, std::string>;

struct Fault {
  ExecStatus status;
  std::string detail;
};

std::string Render(const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) return "None";
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

bool Truthy(const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) return false;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i != 0;
  return !std::get<std::string>(v).empty();
}

// Two's-complement wraparound keeps overflow deterministic.
std::int64_t WrapAdd(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t WrapSub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t WrapMul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

// Floor division and modulo with the sign of the divisor.
std::int64_t FloorDiv(std::int64_t a, std::int64_t b) {
  if (a == INT64_MIN && b == -1) return INT64_MIN;
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
std::int64_t FloorMod(std::int64_t a, std::int64_t b) {
  if (b == -1) return 0;
  std::int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

bool Allowed(std::string_view capability) {
  const auto& allow = CapabilityAllowList();
  return std::find(allow.begin(), allow.end(), capability) != allow.end();
}

// Literal require("x") calls are resolved before the program runs, the way a
// missing import fails at load time.
void CheckStaticCapabilities(const SyntaxNode& node, std::string& missing) {
  if (!missing.empty()) return;
  if (node.kind == NodeKind::kCall && node.name == "require" && node.children.size() == 1 &&
      node.children[0].kind == NodeKind::kLiteral) {
    if (const auto* s = std::get_if<std::string>(&node.children[0].literal)) {
      if (!Allowed(*s)) {
        missing = *s;
        return;
      }
    }
  }
  for (const auto& child : node.children) CheckStaticCapabilities(child, missing);
}

class Machine {
 public:
  explicit Machine(const ExecBudget& budget) : budget_(budget) {}

  void RunModule(const SyntaxNode& module) {
    for (const auto& stmt : module.children) {
      if (Exec(stmt, nullptr) == Flow::kReturn) return;
    }
  }

  Value EvalTopLevel(const SyntaxNode& expr) { return Eval(expr, nullptr); }

  void Emit(const std::string& text) {
    if (!out_.empty()) out_.push_back('\n');
    out_ += text;
    if (static_cast<std::int64_t>(out_.size()) > budget_.max_output_bytes) {
      out_.resize(static_cast<std::size_t>(budget_.max_output_bytes));
      throw Fault{ExecStatus::kStepLimitExceeded, "output limit"};
    }
  }

  std::string& output() { return out_; }
  std::int64_t steps() const { return steps_; }

 private:
  enum class Flow { kNormal, kReturn };
  using Locals = std::map<std::string, Value, std::less<>>;

  void Tick() {
    if (steps_ >= budget_.max_steps) throw Fault{ExecStatus::kStepLimitExceeded, "step limit"};
    ++steps_;
  }

  Flow ExecBlock(const std::vector<SyntaxNode>& stmts, std::size_t begin, std::size_t end,
                 Locals* locals) {
    for (std::size_t i = begin; i < end; ++i) {
      if (Exec(stmts[i], locals) == Flow::kReturn) return Flow::kReturn;
    }
    return Flow::kNormal;
  }

  void Assign(const std::string& name, Value v, Locals* locals) {
    if (functions_.count(name) != 0) {
      throw Fault{ExecStatus::kTypeFault, "cannot assign to function " + name};
    }
    if (locals != nullptr) {
      (*locals)[name] = std::move(v);
    } else {
      globals_[name] = std::move(v);
    }
  }

  Flow Exec(const SyntaxNode& s, Locals* locals) {
    Tick();
    switch (s.kind) {
      case NodeKind::kFunctionDef:
        if (globals_.count(s.name) != 0) {
          throw Fault{ExecStatus::kTypeFault, "function name shadows variable " + s.name};
        }
        functions_[s.name] = &s;
        return Flow::kNormal;
      case NodeKind::kIf:
        if (Truthy(Eval(s.children[0], locals))) {
          return ExecBlock(s.children, 1, s.else_begin, locals);
        }
        return ExecBlock(s.children, s.else_begin, s.children.size(), locals);
      case NodeKind::kFor: {
        const Value bound = Eval(s.children[0], locals);
        const auto* n = std::get_if<std::int64_t>(&bound);
        if (n == nullptr) throw Fault{ExecStatus::kTypeFault, "range() needs an integer"};
        for (std::int64_t i = 0; i < *n; ++i) {
          Assign(s.name, i, locals);
          if (ExecBlock(s.children, 1, s.children.size(), locals) == Flow::kReturn) {
            return Flow::kReturn;
          }
        }
        return Flow::kNormal;
      }
      case NodeKind::kWhile:
        while (Truthy(Eval(s.children[0], locals))) {
          if (ExecBlock(s.children, 1, s.children.size(), locals) == Flow::kReturn) {
            return Flow::kReturn;
          }
        }
        return Flow::kNormal;
      case NodeKind::kReturn:
        return_value_ = s.children.empty() ? Value{} : Eval(s.children[0], locals);
        return Flow::kReturn;
      case NodeKind::kAssign:
        Assign(s.name, Eval(s.children[0], locals), locals);
        return Flow::kNormal;
      case NodeKind::kExprStmt:
        Eval(s.children[0], locals);
        return Flow::kNormal;
      case NodeKind::kPrint:
        Emit(Render(Eval(s.children[0], locals)));
        return Flow::kNormal;
      default:
        throw Fault{ExecStatus::kHostFault, "unexpected statement kind"};
    }
  }

  Value Lookup(const std::string& name, Locals* locals) {
    if (locals != nullptr) {
      if (auto it = locals->find(name); it != locals->end()) return it->second;
    }
    if (auto it = globals_.find(name); it != globals_.end()) return it->second;
    if (functions_.count(name) != 0) {
      throw Fault{ExecStatus::kTypeFault, "function " + name + " used as a value"};
    }
    throw Fault{ExecStatus::kUndefinedName, "name '" + name + "' is not defined"};
  }

  Value Call(const SyntaxNode& call, Locals* locals) {
    std::vector<Value> args;
    args.reserve(call.children.size());
    for (const auto& a : call.children) args.push_back(Eval(a, locals));

    if (call.name == "require" && functions_.count("require") == 0) {
      if (args.size() != 1 || !std::holds_alternative<std::string>(args[0])) {
        throw Fault{ExecStatus::kTypeFault, "require() takes one string"};
      }
      const auto& capability = std::get<std::string>(args[0]);
      if (!Allowed(capability)) {
        throw Fault{ExecStatus::kMissingCapability, "no capability '" + capability + "'"};
      }
      return Value{};
    }

    auto it = functions_.find(call.name);
    if (it == functions_.end()) {
      if (globals_.count(call.name) != 0 || (locals != nullptr && locals->count(call.name) != 0)) {
        throw Fault{ExecStatus::kTypeFault, "'" + call.name + "' is not callable"};
      }
      throw Fault{ExecStatus::kUndefinedName, "function '" + call.name + "' is not defined"};
    }
    const SyntaxNode& def = *it->second;
    if (def.params.size() != args.size()) {
      throw Fault{ExecStatus::kTypeFault, call.name + "() takes " +
                                              std::to_string(def.params.size()) + " arguments"};
    }
    if (call_depth_ >= kMaxCallDepth) {
      throw Fault{ExecStatus::kStepLimitExceeded, "call depth limit"};
    }
    Locals frame;
    for (std::size_t i = 0; i < args.size(); ++i) frame[def.params[i]] = std::move(args[i]);
    ++call_depth_;
    return_value_ = Value{};
    const Flow flow = ExecBlock(def.children, 0, def.children.size(), &frame);
    --call_depth_;
    Value result = flow == Flow::kReturn ? std::move(return_value_) : Value{};
    return_value_ = Value{};
    return result;
  }

  Value Eval(const SyntaxNode& e, Locals* locals) {
    Tick();
    switch (e.kind) {
      case NodeKind::kLiteral:
        if (const auto* i = std::get_if<std::int64_t>(&e.literal)) return *i;
        return std::get<std::string>(e.literal);
      case NodeKind::kName:
        return Lookup(e.name, locals);
      case NodeKind::kCall:
        return Call(e, locals);
      case NodeKind::kBinOp:
        return EvalBinOp(e, locals);
      default:
        throw Fault{ExecStatus::kHostFault, "unexpected expression kind"};
    }
  }

  Value EvalBinOp(const SyntaxNode& e, Locals* locals) {
    const std::string& op = e.name;
    if (e.children.size() == 1) {
      const Value v = Eval(e.children[0], locals);
      const auto* i = std::get_if<std::int64_t>(&v);
      if (i == nullptr) throw Fault{ExecStatus::kTypeFault, "unary '-' needs an integer"};
      return WrapSub(0, *i);
    }
    if (op == "and") {
      if (!Truthy(Eval(e.children[0], locals))) return std::int64_t{0};
      return std::int64_t{Truthy(Eval(e.children[1], locals)) ? 1 : 0};
    }
    if (op == "or") {
      if (Truthy(Eval(e.children[0], locals))) return std::int64_t{1};
      return std::int64_t{Truthy(Eval(e.children[1], locals)) ? 1 : 0};
    }
    const Value lhs = Eval(e.children[0], locals);
    const Value rhs = Eval(e.children[1], locals);
    if (op == "==") return std::int64_t{lhs == rhs ? 1 : 0};
    if (op == "!=") return std::int64_t{lhs != rhs ? 1 : 0};

    const auto* li = std::get_if<std::int64_t>(&lhs);
    const auto* ri = std::get_if<std::int64_t>(&rhs);
    if (li != nullptr && ri != nullptr) {
      const std::int64_t a = *li, b = *ri;
      if (op == "+") return WrapAdd(a, b);
      if (op == "-") return WrapSub(a, b);
      if (op == "*") return WrapMul(a, b);
      if (op == "/" || op == "%") {
        if (b == 0) throw Fault{ExecStatus::kDivisionByZero, "division by zero"};
        return op == "/" ? FloorDiv(a, b) : FloorMod(a, b);
      }
      if (op == "<") return std::int64_t{a < b ? 1 : 0};
      if (op == ">") return std::int64_t{a > b ? 1 : 0};
    }
    const auto* ls = std::get_if<std::string>(&lhs);
    const auto* rs = std::get_if<std::string>(&rhs);
    if (ls != nullptr && rs != nullptr) {
      if (op == "+") {
        if (static_cast<std::int64_t>(ls->size() + rs->size()) > budget_.max_output_bytes * 4) {
          throw Fault{ExecStatus::kStepLimitExceeded, "string size limit"};
        }
        return *ls + *rs;
      }
      if (op == "<") return std::int64_t{*ls < *rs ? 1 : 0};
      if (op == ">") return std::int64_t{*ls > *rs ? 1 : 0};
    }
    throw Fault{ExecStatus::kTypeFault, "unsupported operand types for '" + op + "'"};
  }

  ExecBudget budget_;
  std::int64_t steps_ = 0;
  int call_depth_ = 0;
  std::string out_;
  std::map<std::string, Value, std::less<>> globals_;
  std::map<std::string, const SyntaxNode*, std::less<>> functions_;
  Value return_value_;
};

bool StartsWithWord(std::string_view line, std::string_view word) {
  return line.substr(0, word.size()) == word;
}

ExecResult RunChecked(std::string_view source, const std::string* probe,
                      const ExecBudget& budget) {
  ExecResult result;
  if (budget.max_steps <= 0 || budget.max_output_bytes <= 0) {
    result.status = ExecStatus::kHostFault;
    result.detail = "budget must be positive";
    return result;
  }
  if (IsBlankSource(source)) {
    result.status = ExecStatus::kEmptySource;
    return result;
  }
  if (LooksForeign(source)) {
    result.status = ExecStatus::kForeignSyntax;
    return result;
  }
  ParseResult parsed = Parse(source);
  if (!parsed.ok()) {
    result.status = ExecStatus::kParseFailure;
    result.detail = "offset " + std::to_string(parsed.failure().offset) + ": expected " +
                    parsed.failure().expected;
    return result;
  }
  std::optional<ParseResult> probe_parsed;
  if (probe != nullptr) {
    probe_parsed.emplace(Parse(*probe));
    if (!probe_parsed->ok() || probe_parsed->tree().children.size() != 1 ||
        probe_parsed->tree().children[0].kind != NodeKind::kExprStmt) {
      result.status = ExecStatus::kHostFault;
      result.detail = "probe is not a single expression";
      return result;
    }
  }
  std::string missing;
  CheckStaticCapabilities(parsed.tree(), missing);
  if (!missing.empty()) {
    result.status = ExecStatus::kMissingCapability;
    result.detail = "no capability '" + missing + "'";
    return result;
  }

  Machine machine(budget);
  try {
    machine.RunModule(parsed.tree());
    if (probe_parsed) {
      machine.Emit(Render(machine.EvalTopLevel(probe_parsed->tree().children[0].children[0])));
    }
    result.status = ExecStatus::kOk;
  } catch (const Fault& f) {
    result.status = f.status;
    result.detail = f.detail;
  } catch (const std::exception& e) {
    result.status = ExecStatus::kHostFault;
    result.detail = e.what();
  }
  result.stdout_text = std::move(machine.output());
  result.steps_used = machine.steps();
  return result;
}

}  // namespace

std::string_view ExecStatusName(ExecStatus status) {
  switch (status) {
    case ExecStatus::kOk: return "Ok";
    case ExecStatus::kParseFailure: return "ParseFailure";
    case ExecStatus::kUndefinedName: return "UndefinedName";
    case ExecStatus::kTypeFault: return "TypeFault";
    case ExecStatus::kDivisionByZero: return "DivisionByZero";
    case ExecStatus::kStepLimitExceeded: return "StepLimitExceeded";
    case ExecStatus::kEmptySource: return "EmptySource";
    case ExecStatus::kForeignSyntax: return "ForeignSyntax";
    case ExecStatus::kMissingCapability: return "MissingCapability";
    case ExecStatus::kHostFault: return "HostFault";
  }
  return "?";
}

const std::vector<std::string>& CapabilityAllowList() {
  static const std::vector<std::string> kAllow = {"math", "strings", "text"};
  return kAllow;
}

bool LooksForeign(std::string_view source) {
  static constexpr std::array<std::string_view, 16> kLineStarts = {
      "public ", "private ", "protected ", "function ", "let ", "var ", "const ", "fn ",
      "func ", "package ", "using ", "namespace ", "#include", "import java", "int main",
      "console.log"};
  static constexpr std::array<std::string_view, 7> kAnywhere = {
      "=>", "::", "&&", "||", "++", "System.out", "public static"};

  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t end = source.find('\n', pos);
    if (end == std::string_view::npos) end = source.size();
    std::string_view line = source.substr(pos, end - pos);
    const std::size_t first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos) {
      std::string_view body = line.substr(first);
      for (std::string_view w : kLineStarts) {
        if (StartsWithWord(body, w)) return true;
      }
      // Scan code outside string literals and comments.
      bool in_string = false;
      std::string code;
      for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (in_string) {
          if (c == '\\') {
            ++i;
          } else if (c == '"') {
            in_string = false;
          }
          continue;
        }
        if (c == '"') {
          in_string = true;
          continue;
        }
        if (c == '#') break;
        if (c == '{' || c == '}' || c == ';') return true;
        code.push_back(c);
      }
      for (std::string_view m : kAnywhere) {
        if (code.find(m) != std::string::npos) return true;
      }
    }
    pos = end + 1;
  }
  return false;
}

ExecResult Interpret(std::string_view source, const ExecBudget& budget) {
  return RunChecked(source, nullptr, budget);
}

ExecResult InterpretWithProbe(std::string_view source, std::string_view probe,
                              const ExecBudget& budget) {
  const std::string probe_text(probe);
  return RunChecked(source, &probe_text, budget);
}

}  // namespace privforge::minilang
