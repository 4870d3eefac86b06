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

#include "minilang_lexer.h"

#include <array>
#include <cctype>
#include <limits>

namespace privforge::minilang {
namespace {

constexpr std::array<std::string_view, 10> kKeywords = {
    "def", "if", "else", "for", "in", "while", "return", "print", "and", "or"};

constexpr int kIndentWidth = 4;

bool IsNameStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  LexOutput Run() {
    std::vector<int> indents = {0};
    std::size_t pos = 0;
    while (pos < src_.size() && out_.ok) {
      std::size_t line_end = src_.find('\n', pos);
      if (line_end == std::string_view::npos) line_end = src_.size();
      LexLine(pos, line_end, indents);
      pos = line_end + 1;
    }
    if (!out_.ok) return std::move(out_);
    const std::size_t eof = src_.size();
    while (indents.size() > 1) {
      indents.pop_back();
      Push(TokenKind::kDedent, "", eof, eof);
    }
    Push(TokenKind::kEnd, "", eof, eof);
    return std::move(out_);
  }

 private:
  void Fail(std::size_t offset, std::string message) {
    if (!out_.ok) return;
    out_.ok = false;
    out_.error_offset = offset;
    out_.error = std::move(message);
  }

  void Push(TokenKind kind, std::string text, std::size_t begin, std::size_t end) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.span = {begin, end};
    out_.tokens.push_back(std::move(t));
  }

  void LexLine(std::size_t begin, std::size_t end, std::vector<int>& indents) {
    std::size_t p = begin;
    while (p < end && src_[p] == ' ') ++p;
    if (p < end && src_[p] == '\t') return Fail(p, "tab indentation");
    // Blank and comment-only lines carry no indentation information.
    std::size_t q = p;
    while (q < end && (src_[q] == ' ' || src_[q] == '\r')) ++q;
    if (q == end || src_[q] == '#') return;

    const int width = static_cast<int>(p - begin);
    if (width % kIndentWidth != 0) return Fail(p, "indentation of 4 spaces per level");
    if (width > indents.back()) {
      if (width != indents.back() + kIndentWidth) return Fail(p, "one indentation level");
      indents.push_back(width);
      Push(TokenKind::kIndent, "", p, p);
    } else {
      while (width < indents.back()) {
        indents.pop_back();
        Push(TokenKind::kDedent, "", p, p);
      }
      if (width != indents.back()) return Fail(p, "dedent to an enclosing level");
    }

    std::size_t last_end = p;
    while (p < end && out_.ok) {
      const char c = src_[p];
      if (c == ' ' || c == '\r') {
        ++p;
      } else if (c == '#') {
        break;
      } else if (IsNameStart(c)) {
        std::size_t s = p;
        while (p < end && IsNameChar(src_[p])) ++p;
        std::string word(src_.substr(s, p - s));
        Push(IsKeyword(word) ? TokenKind::kKeyword : TokenKind::kName, word, s, p);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t s = p;
        std::int64_t value = 0;
        while (p < end && std::isdigit(static_cast<unsigned char>(src_[p]))) {
          const int digit = src_[p] - '0';
          if (value > (std::numeric_limits<std::int64_t>::max() - digit) / 10) {
            return Fail(s, "integer literal in 64-bit range");
          }
          value = value * 10 + digit;
          ++p;
        }
        if (p < end && IsNameChar(src_[p])) return Fail(p, "operator or delimiter after number");
        Push(TokenKind::kInt, std::string(src_.substr(s, p - s)), s, p);
        out_.tokens.back().int_value = value;
      } else if (c == '"') {
        std::size_t s = p++;
        std::string value;
        bool closed = false;
        while (p < end) {
          char d = src_[p++];
          if (d == '"') {
            closed = true;
            break;
          }
          if (d == '\\') {
            if (p >= end) break;
            char e = src_[p++];
            switch (e) {
              case 'n': value.push_back('\n'); break;
              case 't': value.push_back('\t'); break;
              case '"': value.push_back('"'); break;
              case '\\': value.push_back('\\'); break;
              default: return Fail(p - 1, "escape sequence \\n, \\t, \\\" or \\\\");
            }
          } else {
            value.push_back(d);
          }
        }
        if (!closed) return Fail(s, "closing quote");
        Push(TokenKind::kString, std::move(value), s, p);
      } else {
        static constexpr std::array<std::string_view, 2> kTwoChar = {"==", "!="};
        bool matched = false;
        for (std::string_view op : kTwoChar) {
          if (src_.substr(p, 2) == op && p + 2 <= end) {
            Push(TokenKind::kOp, std::string(op), p, p + 2);
            p += 2;
            matched = true;
            break;
          }
        }
        if (!matched) {
          static constexpr std::string_view kSingle = "+-*/%<>=(),:";
          if (kSingle.find(c) == std::string_view::npos) {
            return Fail(p, std::string("valid character, found '") + c + "'");
          }
          Push(TokenKind::kOp, std::string(1, c), p, p + 1);
          ++p;
        }
      }
      if (!out_.tokens.empty()) last_end = out_.tokens.back().span.end;
    }
    Push(TokenKind::kNewline, "", last_end, last_end);
  }

  std::string_view src_;
  LexOutput out_;
};

}  // namespace

bool IsKeyword(std::string_view word) {
  for (std::string_view k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

LexOutput Lex(std::string_view source) { return Lexer(source).Run(); }

}  // namespace privforge::minilang
