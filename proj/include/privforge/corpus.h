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

#ifndef PRIVFORGE_CORPUS_H_
#define PRIVFORGE_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace privforge {

using TokenId = std::int32_t;

// Byte-level vocabulary: ids 0..255 are the raw byte values, followed by four
// special tokens. The mapping is fixed, so there is nothing to train.
struct Vocabulary {
  static constexpr TokenId kBos = 256;
  static constexpr TokenId kEos = 257;
  static constexpr TokenId kPad = 258;
  static constexpr TokenId kSep = 259;
  static constexpr int kSize = 260;

  static constexpr bool IsByte(TokenId id) { return id >= 0 && id < 256; }
  static constexpr bool IsSpecial(TokenId id) { return id >= 256 && id < kSize; }
  static constexpr TokenId ByteId(unsigned char b) { return static_cast<TokenId>(b); }
};

enum class LanguageTag { kMiniLang, kOther };

std::string_view LanguageTagName(LanguageTag tag);

struct CodeSnippet {
  std::string source;
  LanguageTag language = LanguageTag::kMiniLang;

  bool operator==(const CodeSnippet&) const = default;
};

// The prompt is public; only the snippet is protected by DP training.
struct PromptCodePair {
  std::string prompt;
  CodeSnippet snippet;
  // Unknown record fields, carried through load/save verbatim.
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const PromptCodePair&) const = default;
};

struct Dataset {
  std::string id;
  std::vector<PromptCodePair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

std::vector<TokenId> Tokenize(std::string_view text);

// Throws kSpecialTokenInOutput for any non-byte id.
std::string Detokenize(std::span<const TokenId> ids);

// Joined training sequence: BOS prompt SEP snippet EOS. Positions from
// `target_begin` onward are snippet bytes followed by EOS.
struct JoinedSequence {
  std::vector<TokenId> tokens;
  std::size_t target_begin = 0;
};

JoinedSequence JoinPromptAndSnippet(std::string_view prompt,
                                    std::string_view snippet);

// Prompt prefix used at generation time: BOS prompt SEP.
std::vector<TokenId> PromptPrefix(std::string_view prompt);

// Shannon entropy in bits per token of the empirical byte distribution over
// all snippets. Throws kEmptyCorpus when there are no tokens.
double CorpusEntropy(const Dataset& ds);
double TextEntropy(std::span<const std::string> texts);

// Line-delimited records: {"prompt": ..., "code": ..., "language_tag": ...}.
PromptCodePair ParseRecord(std::string_view line, std::size_t line_number);
std::string SerializeRecord(const PromptCodePair& pair);

Dataset ParseDataset(std::string_view contents, std::string id);
std::string SerializeDataset(const Dataset& ds);

Dataset LoadDataset(const std::filesystem::path& path);
void SaveDataset(const Dataset& ds, const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace privforge

#endif  // PRIVFORGE_CORPUS_H_
