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

#ifndef PRIVFORGE_SRC_MINILANG_LEXER_H_
#define PRIVFORGE_SRC_MINILANG_LEXER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "privforge/minilang.h"

namespace privforge::minilang {

enum class TokenKind {
  kName,
  kKeyword,
  kInt,
  kString,
  kOp,
  kNewline,
  kIndent,
  kDedent,
  kEnd,
};

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;  // decoded value for strings, spelling otherwise
  std::int64_t int_value = 0;
  Span span;
};

struct LexOutput {
  std::vector<Token> tokens;
  bool ok = true;
  std::size_t error_offset = 0;
  std::string error;
};

LexOutput Lex(std::string_view source);

bool IsKeyword(std::string_view word);

}  // namespace privforge::minilang

#endif  // PRIVFORGE_SRC_MINILANG_LEXER_H_
