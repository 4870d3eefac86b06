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

#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "privforge/error.h"
#include "privforge/filters.h"

namespace privforge {
namespace {

using TrigramCounts = std::map<std::string, double, std::less<>>;

struct WordVector {
  TrigramCounts counts;
  double norm2 = 0.0;  // squared norm, an exact integer
};

std::vector<WordVector> Embed(std::string_view text) {
  std::vector<WordVector> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    if (end == pos) break;
    std::string padded = "#";
    for (std::size_t i = pos; i < end; ++i) {
      padded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
    }
    padded.push_back('#');
    WordVector wv;
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) wv.counts[padded.substr(i, 3)] += 1.0;
    for (const auto& [gram, c] : wv.counts) wv.norm2 += c * c;
    words.push_back(std::move(wv));
    pos = end;
  }
  return words;
}

double Cosine(const WordVector& a, const WordVector& b) {
  double dot = 0.0;
  for (const auto& [gram, c] : a.counts) {
    if (auto it = b.counts.find(gram); it != b.counts.end()) dot += c * it->second;
  }
  // sqrt(n * n) == n exactly, so identical words score exactly 1.
  return dot / std::sqrt(a.norm2 * b.norm2);
}

double GreedyMean(const std::vector<WordVector>& from, const std::vector<WordVector>& to) {
  double sum = 0.0;
  for (const auto& w : from) {
    double best = 0.0;
    for (const auto& u : to) best = std::max(best, Cosine(w, u));
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

SimilarityScore TokenMatchSimilarity(std::string_view a, std::string_view b) {
  const auto wa = Embed(a);
  const auto wb = Embed(b);
  if (wa.empty() || wb.empty()) throw Error(ErrorCode::kEmptyText, "similarity needs words on both sides");
  SimilarityScore s;
  s.precision = std::min(1.0, GreedyMean(wa, wb));
  s.recall = std::min(1.0, GreedyMean(wb, wa));
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

}  // namespace privforge
