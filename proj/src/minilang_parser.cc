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
#include <cctype>
#include <string>
#include <utility>

#include "minilang_lexer.h"
#include "privforge/error.h"
#include "privforge/minilang.h"

namespace privforge::minilang {
namespace {

constexpr int kMaxNesting = 200;

struct SyntaxError {
  std::size_t offset;
  std::string expected;
};

class Parser {
 public:
  Parser(std::string_view source, std::vector<Token> tokens)
      : source_(source), tokens_(std::move(tokens)) {}

  SyntaxNode ParseModule() {
    SyntaxNode module;
    module.kind = NodeKind::kModule;
    module.span = {0, source_.size()};
    while (Peek().kind != TokenKind::kEnd) {
      module.children.push_back(ParseStatement());
    }
    return module;
  }

 private:
  const Token& Peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& Advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  bool IsOp(std::string_view op, std::size_t ahead = 0) const {
    const Token& t = Peek(ahead);
    return t.kind == TokenKind::kOp && t.text == op;
  }
  bool IsKeyword(std::string_view kw) const {
    const Token& t = Peek();
    return t.kind == TokenKind::kKeyword && t.text == kw;
  }

  [[noreturn]] void Fail(std::string expected) const {
    throw SyntaxError{Peek().span.begin, std::move(expected)};
  }

  const Token& ExpectOp(std::string_view op) {
    if (!IsOp(op)) Fail("'" + std::string(op) + "'");
    return Advance();
  }
  const Token& ExpectKeyword(std::string_view kw) {
    if (!IsKeyword(kw)) Fail("'" + std::string(kw) + "'");
    return Advance();
  }
  const Token& ExpectName(std::string_view what) {
    if (Peek().kind != TokenKind::kName) Fail(std::string(what));
    return Advance();
  }
  void ExpectNewline() {
    if (Peek().kind != TokenKind::kNewline) Fail("end of line");
    Advance();
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxNesting) parser.Fail("shallower nesting");
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  // ':' NEWLINE INDENT statement+ DEDENT, appended to `owner`.
  void ParseBlock(SyntaxNode& owner) {
    ExpectOp(":");
    ExpectNewline();
    if (Peek().kind != TokenKind::kIndent) Fail("indented block");
    Advance();
    do {
      owner.children.push_back(ParseStatement());
    } while (Peek().kind != TokenKind::kDedent && Peek().kind != TokenKind::kEnd);
    if (Peek().kind == TokenKind::kDedent) Advance();
    owner.span.end = owner.children.back().span.end;
  }

  SyntaxNode ParseStatement() {
    DepthGuard guard(*this);
    const Token& first = Peek();
    if (first.kind == TokenKind::kKeyword) {
      if (first.text == "def") return ParseFunctionDef();
      if (first.text == "if") return ParseIf();
      if (first.text == "for") return ParseFor();
      if (first.text == "while") return ParseWhile();
      if (first.text == "return") return ParseSimple(ParseReturn());
      if (first.text == "print") return ParseSimple(ParsePrint());
    }
    if (first.kind == TokenKind::kName && IsOp("=", 1)) return ParseSimple(ParseAssign());
    if (first.kind == TokenKind::kIndent) Fail("statement at the enclosing indentation");
    SyntaxNode stmt;
    stmt.kind = NodeKind::kExprStmt;
    stmt.children.push_back(ParseExpression());
    stmt.span = stmt.children.back().span;
    return ParseSimple(std::move(stmt));
  }

  SyntaxNode ParseSimple(SyntaxNode stmt) {
    ExpectNewline();
    return stmt;
  }

  SyntaxNode ParseFunctionDef() {
    SyntaxNode node;
    node.kind = NodeKind::kFunctionDef;
    node.span.begin = ExpectKeyword("def").span.begin;
    node.name = ExpectName("function name").text;
    ExpectOp("(");
    if (!IsOp(")")) {
      node.params.push_back(ExpectName("parameter name or ')'").text);
      while (IsOp(",")) {
        Advance();
        node.params.push_back(ExpectName("parameter name").text);
      }
    }
    ExpectOp(")");
    ParseBlock(node);
    return node;
  }

  SyntaxNode ParseIf() {
    SyntaxNode node;
    node.kind = NodeKind::kIf;
    node.span.begin = ExpectKeyword("if").span.begin;
    node.children.push_back(ParseExpression());
    ParseBlock(node);
    node.else_begin = node.children.size();
    if (IsKeyword("else")) {
      Advance();
      ParseBlock(node);
    }
    return node;
  }

  SyntaxNode ParseFor() {
    SyntaxNode node;
    node.kind = NodeKind::kFor;
    node.span.begin = ExpectKeyword("for").span.begin;
    node.name = ExpectName("loop variable").text;
    ExpectKeyword("in");
    if (Peek().kind != TokenKind::kName || Peek().text != "range") Fail("'range'");
    Advance();
    ExpectOp("(");
    node.children.push_back(ParseExpression());
    ExpectOp(")");
    ParseBlock(node);
    return node;
  }

  SyntaxNode ParseWhile() {
    SyntaxNode node;
    node.kind = NodeKind::kWhile;
    node.span.begin = ExpectKeyword("while").span.begin;
    node.children.push_back(ParseExpression());
    ParseBlock(node);
    return node;
  }

  SyntaxNode ParseReturn() {
    SyntaxNode node;
    node.kind = NodeKind::kReturn;
    node.span = ExpectKeyword("return").span;
    if (Peek().kind != TokenKind::kNewline) {
      node.children.push_back(ParseExpression());
      node.span.end = node.children.back().span.end;
    }
    return node;
  }

  SyntaxNode ParsePrint() {
    SyntaxNode node;
    node.kind = NodeKind::kPrint;
    node.span.begin = ExpectKeyword("print").span.begin;
    ExpectOp("(");
    node.children.push_back(ParseExpression());
    node.span.end = ExpectOp(")").span.end;
    return node;
  }

  SyntaxNode ParseAssign() {
    SyntaxNode node;
    node.kind = NodeKind::kAssign;
    const Token& target = ExpectName("assignment target");
    node.name = target.text;
    node.span.begin = target.span.begin;
    ExpectOp("=");
    node.children.push_back(ParseExpression());
    node.span.end = node.children.back().span.end;
    return node;
  }

  static SyntaxNode MakeBinOp(std::string op, SyntaxNode lhs, SyntaxNode rhs) {
    SyntaxNode node;
    node.kind = NodeKind::kBinOp;
    node.name = std::move(op);
    node.span = {lhs.span.begin, rhs.span.end};
    node.children.push_back(std::move(lhs));
    node.children.push_back(std::move(rhs));
    return node;
  }

  SyntaxNode ParseExpression() {
    DepthGuard guard(*this);
    return ParseOr();
  }

  SyntaxNode ParseOr() {
    SyntaxNode lhs = ParseAnd();
    while (IsKeyword("or")) {
      Advance();
      lhs = MakeBinOp("or", std::move(lhs), ParseAnd());
    }
    return lhs;
  }

  SyntaxNode ParseAnd() {
    SyntaxNode lhs = ParseComparison();
    while (IsKeyword("and")) {
      Advance();
      lhs = MakeBinOp("and", std::move(lhs), ParseComparison());
    }
    return lhs;
  }

  SyntaxNode ParseComparison() {
    SyntaxNode lhs = ParseAdditive();
    while (IsOp("==") || IsOp("!=") || IsOp("<") || IsOp(">")) {
      std::string op = Advance().text;
      lhs = MakeBinOp(std::move(op), std::move(lhs), ParseAdditive());
    }
    return lhs;
  }

  SyntaxNode ParseAdditive() {
    SyntaxNode lhs = ParseMultiplicative();
    while (IsOp("+") || IsOp("-")) {
      std::string op = Advance().text;
      lhs = MakeBinOp(std::move(op), std::move(lhs), ParseMultiplicative());
    }
    return lhs;
  }

  SyntaxNode ParseMultiplicative() {
    SyntaxNode lhs = ParseUnary();
    while (IsOp("*") || IsOp("/") || IsOp("%")) {
      std::string op = Advance().text;
      lhs = MakeBinOp(std::move(op), std::move(lhs), ParseUnary());
    }
    return lhs;
  }

  SyntaxNode ParseUnary() {
    if (IsOp("-")) {
      DepthGuard guard(*this);
      SyntaxNode node;
      node.kind = NodeKind::kBinOp;
      node.name = "-";
      node.span.begin = Advance().span.begin;
      node.children.push_back(ParseUnary());
      node.span.end = node.children.back().span.end;
      return node;
    }
    return ParsePrimary();
  }

  SyntaxNode ParsePrimary() {
    const Token& t = Peek();
    SyntaxNode node;
    switch (t.kind) {
      case TokenKind::kInt:
        node.kind = NodeKind::kLiteral;
        node.literal = t.int_value;
        node.span = Advance().span;
        return node;
      case TokenKind::kString:
        node.kind = NodeKind::kLiteral;
        node.literal = t.text;
        node.span = Advance().span;
        return node;
      case TokenKind::kName: {
        node.name = t.text;
        node.span = Advance().span;
        if (!IsOp("(")) {
          node.kind = NodeKind::kName;
          return node;
        }
        node.kind = NodeKind::kCall;
        Advance();
        if (!IsOp(")")) {
          node.children.push_back(ParseExpression());
          while (IsOp(",")) {
            Advance();
            node.children.push_back(ParseExpression());
          }
        }
        node.span.end = ExpectOp(")").span.end;
        return node;
      }
      case TokenKind::kOp:
        if (t.text == "(") {
          const std::size_t open = Advance().span.begin;
          node = ParseExpression();
          const std::size_t close = ExpectOp(")").span.end;
          // Parentheses belong to the expression's extent.
          node.span = {open, close};
          return node;
        }
        break;
      default:
        break;
    }
    Fail("expression");
  }

  std::string_view source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

void CollectStructural(std::string_view source, const SyntaxNode& node,
                       std::vector<StructuralSpan>& out) {
  if (IsStructural(node.kind)) {
    out.push_back({node.kind, node.span,
                   std::string(source.substr(node.span.begin, node.span.size()))});
  }
  for (const auto& child : node.children) CollectStructural(source, child, out);
}

}  // namespace

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kModule: return "Module";
    case NodeKind::kFunctionDef: return "FunctionDef";
    case NodeKind::kIf: return "If";
    case NodeKind::kFor: return "For";
    case NodeKind::kWhile: return "While";
    case NodeKind::kReturn: return "Return";
    case NodeKind::kAssign: return "Assign";
    case NodeKind::kExprStmt: return "ExprStmt";
    case NodeKind::kCall: return "Call";
    case NodeKind::kBinOp: return "BinOp";
    case NodeKind::kName: return "Name";
    case NodeKind::kLiteral: return "Literal";
    case NodeKind::kPrint: return "Print";
  }
  return "?";
}

bool IsStructural(NodeKind kind) {
  return kind == NodeKind::kFunctionDef || kind == NodeKind::kIf ||
         kind == NodeKind::kFor || kind == NodeKind::kWhile || kind == NodeKind::kReturn;
}

bool IsBlankSource(std::string_view source) {
  bool in_comment = false;
  for (char c : source) {
    if (c == '\n') {
      in_comment = false;
    } else if (in_comment) {
      continue;
    } else if (c == '#') {
      in_comment = true;
    } else if (!std::isspace(static_cast<unsigned char>(c)) && c != '`') {
      return false;
    }
  }
  return true;
}

ParseResult Parse(std::string_view source) {
  if (IsBlankSource(source)) {
    return ParseFailure{ParseFailure::Reason::kEmptySource, 0, "non-empty source"};
  }
  LexOutput lexed = Lex(source);
  if (!lexed.ok) {
    return ParseFailure{ParseFailure::Reason::kSyntax, lexed.error_offset, lexed.error};
  }
  try {
    Parser parser(source, std::move(lexed.tokens));
    return parser.ParseModule();
  } catch (const SyntaxError& e) {
    return ParseFailure{ParseFailure::Reason::kSyntax, e.offset, e.expected};
  }
}

std::vector<StructuralSpan> ExtractStructuralTokens(std::string_view source,
                                                    const SyntaxNode& tree) {
  std::vector<StructuralSpan> out;
  CollectStructural(source, tree, out);
  return out;
}

std::vector<StructuralSpan> ExtractStructuralTokens(std::string_view source) {
  ParseResult parsed = Parse(source);
  if (!parsed.ok()) {
    throw Error(ErrorCode::kParseError,
                "offset " + std::to_string(parsed.failure().offset) + ": expected " +
                    parsed.failure().expected);
  }
  return ExtractStructuralTokens(source, parsed.tree());
}

std::vector<std::string> DefinedFunctions(const SyntaxNode& tree) {
  std::vector<std::string> names;
  for (const auto& stmt : tree.children) {
    if (stmt.kind == NodeKind::kFunctionDef) names.push_back(stmt.name);
  }
  return names;
}

}  // namespace privforge::minilang
