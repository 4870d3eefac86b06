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

#include "privforge/corpus.h"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "privforge/error.h"

namespace privforge {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kSpecialTokenInOutput: return "SpecialTokenInOutput";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kTokenOutOfRange: return "TokenOutOfRange";
    case ErrorCode::kEmptySnippet: return "EmptySnippet";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kSigmaZero: return "SigmaZero";
    case ErrorCode::kUnreachable: return "Unreachable";
    case ErrorCode::kPiiCollision: return "PiiCollision";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kCheckpoint: return "Checkpoint";
    case ErrorCode::kStage: return "Stage";
  }
  return "Unknown";
}

std::string_view LanguageTagName(LanguageTag tag) {
  return tag == LanguageTag::kMiniLang ? "MiniLang" : "Other";
}

std::vector<TokenId> Tokenize(std::string_view text) {
  std::vector<TokenId> ids;
  ids.reserve(text.size());
  for (char c : text) ids.push_back(Vocabulary::ByteId(static_cast<unsigned char>(c)));
  return ids;
}

std::string Detokenize(std::span<const TokenId> ids) {
  std::string out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!Vocabulary::IsByte(ids[i])) {
      throw Error(ErrorCode::kSpecialTokenInOutput,
                  "id " + std::to_string(ids[i]) + " at position " + std::to_string(i));
    }
    out.push_back(static_cast<char>(static_cast<unsigned char>(ids[i])));
  }
  return out;
}

std::vector<TokenId> PromptPrefix(std::string_view prompt) {
  std::vector<TokenId> tokens;
  tokens.reserve(prompt.size() + 2);
  tokens.push_back(Vocabulary::kBos);
  for (TokenId id : Tokenize(prompt)) tokens.push_back(id);
  tokens.push_back(Vocabulary::kSep);
  return tokens;
}

JoinedSequence JoinPromptAndSnippet(std::string_view prompt, std::string_view snippet) {
  JoinedSequence seq;
  seq.tokens = PromptPrefix(prompt);
  seq.target_begin = seq.tokens.size();
  for (TokenId id : Tokenize(snippet)) seq.tokens.push_back(id);
  seq.tokens.push_back(Vocabulary::kEos);
  return seq;
}

namespace {

double EntropyFromCounts(const std::array<std::uint64_t, 256>& counts, std::uint64_t total) {
  if (total == 0) throw Error(ErrorCode::kEmptyCorpus, "no tokens");
  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  // A single-symbol corpus gives -1*log2(1) = -0.0.
  return h <= 0.0 ? 0.0 : h;
}

void CountBytes(std::string_view s, std::array<std::uint64_t, 256>& counts,
                std::uint64_t& total) {
  for (char c : s) ++counts[static_cast<unsigned char>(c)];
  total += s.size();
}

}  // namespace

double CorpusEntropy(const Dataset& ds) {
  std::array<std::uint64_t, 256> counts{};
  std::uint64_t total = 0;
  for (const auto& pair : ds.pairs) CountBytes(pair.snippet.source, counts, total);
  return EntropyFromCounts(counts, total);
}

double TextEntropy(std::span<const std::string> texts) {
  std::array<std::uint64_t, 256> counts{};
  std::uint64_t total = 0;
  for (const auto& t : texts) CountBytes(t, counts, total);
  return EntropyFromCounts(counts, total);
}

PromptCodePair ParseRecord(std::string_view line, std::size_t line_number) {
  const std::string where = "line " + std::to_string(line_number);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, where + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kParseError, where + ": record is not an object");

  auto take_string = [&](std::string_view key) -> std::string {
    auto it = j.find(std::string(key));
    if (it == j.end()) throw Error(ErrorCode::kMissingField, where + ": missing `" + std::string(key) + "`");
    if (!it->is_string()) throw Error(ErrorCode::kParseError, where + ": `" + std::string(key) + "` is not a string");
    std::string value = it->get<std::string>();
    j.erase(it);
    return value;
  };

  PromptCodePair pair;
  pair.prompt = take_string("prompt");
  pair.snippet.source = take_string("code");
  if (j.contains("language_tag")) {
    const std::string tag = take_string("language_tag");
    if (tag == "MiniLang") {
      pair.snippet.language = LanguageTag::kMiniLang;
    } else if (tag == "Other") {
      pair.snippet.language = LanguageTag::kOther;
    } else {
      throw Error(ErrorCode::kParseError, where + ": unknown language_tag `" + tag + "`");
    }
  }
  pair.extra = std::move(j);
  return pair;
}

std::string SerializeRecord(const PromptCodePair& pair) {
  // nlohmann::json objects are key-sorted, which makes this the canonical form.
  nlohmann::json j = pair.extra.is_object() ? pair.extra : nlohmann::json::object();
  j["prompt"] = pair.prompt;
  j["code"] = pair.snippet.source;
  j["language_tag"] = std::string(LanguageTagName(pair.snippet.language));
  // Generated snippets may hold arbitrary bytes; invalid UTF-8 becomes U+FFFD.
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

Dataset ParseDataset(std::string_view contents, std::string id) {
  Dataset ds;
  ds.id = std::move(id);
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(pos, end - pos);
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      ds.pairs.push_back(ParseRecord(line, line_number));
    }
    pos = end + 1;
  }
  return ds;
}

std::string SerializeDataset(const Dataset& ds) {
  std::string out;
  for (const auto& pair : ds.pairs) {
    out += SerializeRecord(pair);
    out += '\n';
  }
  return out;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

Dataset LoadDataset(const std::filesystem::path& path) {
  return ParseDataset(ReadFile(path), path.stem().string());
}

void SaveDataset(const Dataset& ds, const std::filesystem::path& path) {
  WriteFile(path, SerializeDataset(ds));
}

}  // namespace privforge
