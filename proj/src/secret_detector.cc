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

#include "privforge/secret_detector.h"

#include <algorithm>

namespace privforge {
namespace {

constexpr auto kFlags = std::regex::ECMAScript | std::regex::optimize;

// Key-based rule: group 2 is the quoted value. Values starting with '<' are
// treated as already masked. The closing quote is a lookahead so it can open
// the next match.
std::regex KeyRule(const char* keys) {
  return std::regex(std::string(R"re((^|[^A-Za-z0-9_])(?:)re") + keys +
                        R"re()\s*[=:]\s*"([^"<\n][^"\n]*)(?="))re",
                    kFlags | std::regex::icase);
}

}  // namespace

SecretDetector SecretDetector::Default() {
  SecretDetector det;
  det.rules_.push_back({PiiCategory::kEmail,
                        std::regex(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})", kFlags),
                        0});
  det.rules_.push_back({PiiCategory::kIpAddress,
                        std::regex(R"(\b(25[0-5]|2[0-4]\d|1?\d?\d)(\.(25[0-5]|2[0-4]\d|1?\d?\d)){3}\b)", kFlags),
                        0});
  det.rules_.push_back({PiiCategory::kPassword, KeyRule("password|passwd|pwd|passphrase|secret"), 2});
  det.rules_.push_back({PiiCategory::kUsername, KeyRule("username|user_name|user|login|handle"), 2});
  det.rules_.push_back({PiiCategory::kName, KeyRule("full_name|name|author|owner|contact_name"), 2});
  return det;
}

std::string_view SecretDetector::MaskToken(PiiCategory c) {
  switch (c) {
    case PiiCategory::kEmail: return "<EMAIL>";
    case PiiCategory::kName: return "<NAME>";
    case PiiCategory::kIpAddress: return "<IP>";
    case PiiCategory::kPassword: return "<PASSWORD>";
    case PiiCategory::kUsername: return "<USERNAME>";
  }
  return "<PII>";
}

std::vector<SecretMatch> SecretDetector::Find(std::string_view text) const {
  std::vector<SecretMatch> out;
  for (const auto& rule : rules_) {
    using It = std::string_view::const_iterator;
    for (std::regex_iterator<It> it(text.begin(), text.end(), rule.pattern), end; it != end; ++it) {
      const auto& m = *it;
      const auto begin = static_cast<std::size_t>(m.position(rule.value_group));
      out.push_back({rule.category, begin, begin + static_cast<std::size_t>(m.length(rule.value_group))});
    }
  }
  std::sort(out.begin(), out.end(), [](const SecretMatch& a, const SecretMatch& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
  });
  return out;
}

std::string SecretDetector::Mask(std::string_view input) const {
  // Rules run in order; each rewrites the output of the previous one. Mask
  // tokens contain '<' and '>', which no rule accepts, so a second pass finds
  // nothing.
  std::string text(input);
  for (const auto& rule : rules_) {
    std::string next;
    next.reserve(text.size());
    std::size_t copied = 0;
    for (std::sregex_iterator it(text.begin(), text.end(), rule.pattern), end; it != end; ++it) {
      const auto& m = *it;
      const auto begin = static_cast<std::size_t>(m.position(rule.value_group));
      next.append(text, copied, begin - copied);
      next.append(MaskToken(rule.category));
      copied = begin + static_cast<std::size_t>(m.length(rule.value_group));
    }
    next.append(text, copied, std::string::npos);
    text = std::move(next);
  }
  return text;
}

std::string MaskPii(std::string_view text, const SecretDetector& det) { return det.Mask(text); }

Dataset MaskDataset(const Dataset& ds, const SecretDetector& det) {
  Dataset out = ds;
  out.id = ds.id + ".masked";
  for (auto& pair : out.pairs) {
    pair.prompt = det.Mask(pair.prompt);
    pair.snippet.source = det.Mask(pair.snippet.source);
  }
  return out;
}

}  // namespace privforge
