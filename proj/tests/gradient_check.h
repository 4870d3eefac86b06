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

// Finite-difference check of the analytic per-sample gradient.

#ifndef PRIVFORGE_TESTS_GRADIENT_CHECK_H_
#define PRIVFORGE_TESTS_GRADIENT_CHECK_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "privforge/lm.h"

namespace privforge::testing {

// Relative error with a small floor so coordinates that are zero on both
// sides compare equal.
inline double RelativeError(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-7});
}

// Sixth-order central differences. The lambda = 1000 KL term has large
// higher derivatives, and second-order differences at any step size lose
// either to truncation or to rounding on the ~1e-8 coordinates.
inline double NumericPartial(LmParams& probe, const LmParams& ref, const TrainingExample& ex, double lambda,
                             double base, std::size_t i, double h = 1e-2) {
  const double x = probe.flat()[i];
  auto f = [&](double d) {
    probe.flat()[i] = x + d;
    return ExampleLoss(probe, ref, ex, lambda).total;
  };
  // A coordinate the loss never reads (embedding rows of absent tokens)
  // leaves every evaluation bitwise unchanged.
  if (f(h) == base && f(-h) == base) {
    probe.flat()[i] = x;
    return 0.0;
  }
  const double d = (f(3 * h) - 9 * f(2 * h) + 45 * f(h) - 45 * f(-h) + 9 * f(-2 * h) - f(-3 * h)) / (60 * h);
  probe.flat()[i] = x;
  return d;
}

// Worst relative error over every coordinate.
inline double MaxGradientError(const LmParams& cur, const LmParams& ref, const TrainingExample& ex,
                               double lambda) {
  const SampleGradient g = PerSampleGradient(cur, ref, ex, lambda);
  LmParams probe = cur;
  const double base = ExampleLoss(cur, ref, ex, lambda).total;
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    worst = std::max(worst, RelativeError(g.grad[i], NumericPartial(probe, ref, ex, lambda, base, i)));
  }
  return worst;
}

struct GradientDraw {
  LmParams current;
  LmParams reference;
  TrainingExample example;
  double lambda = 0.0;
};

// Random draw on a 1856-parameter model (V=260, d=2, w=4, h=4). Draw 0 uses
// lambda = 0 and draw 1 uses lambda = 1000.
inline GradientDraw RandomGradientDraw(std::mt19937_64& rng, int index) {
  static const char* kSnippets[] = {
      "def f(n):\n    if n > 1:\n        return n\n",
      "x = 0\nfor i in range(3):\n    x = x + i\nprint(x)\n",
      "def g(a, b):\n    while a > b:\n        a = a - 1\n    return a\n",
      "print(1)\n",
      "def h():\n    return \"s\"\n",
  };
  LmConfig c{Vocabulary::kSize, 2, 4, 4, rng()};
  GradientDraw d;
  d.current = InitParams(c);
  c.seed = rng();
  d.reference = InitParams(c);
  // Spread the current model away from the reference so KL is not tiny.
  std::normal_distribution<double> jitter(0.0, 0.2);
  for (double& x : d.current.flat()) x += jitter(rng);
  PromptCodePair pair;
  pair.prompt = "draw " + std::to_string(index);
  pair.snippet.source = kSnippets[rng() % 5];
  d.example = MakeExample(pair);
  if (index == 0) {
    d.lambda = 0.0;
  } else if (index == 1) {
    d.lambda = 1000.0;
  } else {
    d.lambda = std::pow(10.0, std::uniform_real_distribution<double>(-2.0, 3.0)(rng));
  }
  return d;
}

}  // namespace privforge::testing

#endif  // PRIVFORGE_TESTS_GRADIENT_CHECK_H_
