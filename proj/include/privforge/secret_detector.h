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

#ifndef PRIVFORGE_SECRET_DETECTOR_H_
#define PRIVFORGE_SECRET_DETECTOR_H_

#include <cstddef>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "privforge/corpus.h"
#include "privforge/evaluation.h"

namespace privforge {

struct SecretMatch {
  PiiCategory category = PiiCategory::kEmail;
  std::size_t begin = 0;  // byte range of the secret value
  std::size_t end = 0;
};

// Pattern rules per PII category. Free-standing values (emails, IPv4
// addresses) are matched anywhere; passwords, usernames and names are matched
// as the quoted value of an assignment to a telltale key.
class SecretDetector {
 public:
  static SecretDetector Default();

  std::vector<SecretMatch> Find(std::string_view text) const;
  std::string Mask(std::string_view text) const;
  static std::string_view MaskToken(PiiCategory c);

 private:
  struct Rule {
    PiiCategory category;
    std::regex pattern;
    int value_group;  // 0 masks the whole match
  };
  std::vector<Rule> rules_;
};

std::string MaskPii(std::string_view text, const SecretDetector& det);

// Masks prompts and snippets of every record.
Dataset MaskDataset(const Dataset& ds, const SecretDetector& det);

}  // namespace privforge

#endif  // PRIVFORGE_SECRET_DETECTOR_H_
