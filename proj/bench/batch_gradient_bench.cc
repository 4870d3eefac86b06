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

// Serial vs OpenMP per-sample gradients over one batch.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "privforge/lm.h"

namespace privforge {
namespace {

std::vector<TrainingExample> MakeBatch(int n) {
  const char* snippets[] = {
      "def add(a, b):\n    return a + b\n",
      "def count(n):\n    total = 0\n    for i in range(n):\n        if i % 2 == 0:\n            total = total + i\n    return total\n",
      "def fact(n):\n    r = 1\n    while n > 1:\n        r = r * n\n        n = n - 1\n    return r\n",
  };
  std::vector<TrainingExample> batch;
  for (int i = 0; i < n; ++i) {
    PromptCodePair pair;
    pair.prompt = "write function number " + std::to_string(i);
    pair.snippet.source = snippets[i % 3];
    batch.push_back(MakeExample(pair));
  }
  return batch;
}

LmConfig BenchConfig() { return LmConfig{Vocabulary::kSize, 8, 12, 24, 7}; }

void BM_BatchGradientsSerial(benchmark::State& state) {
  const LmParams params = InitParams(BenchConfig());
  const auto batch = MakeBatch(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(BatchGradientsSerial(params, params, batch, 10.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchGradientsParallel(benchmark::State& state) {
  const LmParams params = InitParams(BenchConfig());
  const auto batch = MakeBatch(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(BatchGradients(params, params, batch, 10.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_BatchGradientsSerial)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradientsParallel)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace privforge

BENCHMARK_MAIN();
