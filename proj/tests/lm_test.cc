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

#include "privforge/lm.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "privforge/checkpoint.h"
#include "privforge/error.h"
#include "privforge/minilang.h"
#include "gradient_check.h"

namespace privforge {
namespace {

LmConfig SmallConfig(std::uint64_t seed) { return LmConfig{Vocabulary::kSize, 4, 4, 6, seed}; }

PromptCodePair Pair(std::string prompt, std::string code) {
  PromptCodePair p;
  p.prompt = std::move(prompt);
  p.snippet.source = std::move(code);
  return p;
}

LmParams ZeroParams(const LmConfig& c) {
  LmParams p = InitParams(c);
  std::fill(p.flat().begin(), p.flat().end(), 0.0);
  return p;
}

TEST(LmConfigTest, ParamCountMatchesSegments) {
  const LmConfig c = SmallConfig(0);
  EXPECT_EQ(c.ParamCount(), 260u * 4 + 16u * 6 + 6 + 6u * 260 + 260);
  EXPECT_EQ(InitParams(c).size(), c.ParamCount());
  EXPECT_LE(c.ParamCount(), 5000u);
}

TEST(InitTest, DeterministicAndBounded) {
  const LmParams a = InitParams(SmallConfig(3));
  EXPECT_EQ(a, InitParams(SmallConfig(3)));
  EXPECT_NE(a, InitParams(SmallConfig(4)));
  for (double x : a.flat()) {
    EXPECT_GE(x, -0.05);
    EXPECT_LE(x, 0.05);
  }
}

TEST(ForwardTest, ZeroParamsGiveUniform) {
  const LmParams p = ZeroParams(SmallConfig(0));
  const ProbDist d = Forward(p, std::vector<TokenId>{'a', 'b', Vocabulary::kSep, Vocabulary::kPad});
  for (double x : d) EXPECT_DOUBLE_EQ(x, 1.0 / Vocabulary::kSize);
}

TEST(ForwardTest, RandomDrawsAreDistributions) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const LmParams p = InitParams(SmallConfig(rng()));
    std::vector<TokenId> ctx(4);
    for (auto& t : ctx) t = static_cast<TokenId>(rng() % Vocabulary::kSize);
    const ProbDist d = Forward(p, ctx);
    ASSERT_EQ(d.size(), static_cast<std::size_t>(Vocabulary::kSize));
    double sum = 0.0;
    for (double x : d) {
      ASSERT_GE(x, 0.0);
      sum += x;
    }
    ASSERT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(ForwardTest, RejectsOutOfRangeTokens) {
  const LmParams p = InitParams(SmallConfig(0));
  try {
    Forward(p, std::vector<TokenId>{1, 2, 3, 999});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTokenOutOfRange);
  }
}

TEST(ForwardTest, ArgmaxStable) {
  const LmParams p = InitParams(SmallConfig(2));
  const std::vector<TokenId> ctx{'d', 'e', 'f', ' '};
  const ProbDist a = Forward(p, ctx), b = Forward(p, ctx);
  EXPECT_EQ(std::max_element(a.begin(), a.end()) - a.begin(), std::max_element(b.begin(), b.end()) - b.begin());
  EXPECT_EQ(a, b);
}

TEST(SequenceNllTest, UniformModelGivesLogV) {
  const LmParams p = ZeroParams(SmallConfig(0));
  EXPECT_NEAR(SequenceNll(p, Pair("add", "x = 1")).ce, std::log(260.0), 1e-12);
}

TEST(SequenceNllTest, ConstructedCertainModelGivesZero) {
  // One hidden unit reads the last token: +1 after SEP, -1 after 'a'. The
  // output layer turns that into certainty on 'a' then EOS.
  const LmConfig c{Vocabulary::kSize, 1, 1, 1, 0};
  LmParams p = ZeroParams(c);
  p.embedding()[Vocabulary::kSep] = 1.0;
  p.embedding()['a'] = -1.0;
  p.input_projection()[0] = 50.0;
  p.output_projection()['a'] = 100.0;
  p.output_projection()[Vocabulary::kEos] = -100.0;
  EXPECT_NEAR(SequenceNll(p, Pair("", "a")).ce, 0.0, 1e-12);
}

TEST(SequenceNllTest, EmptySnippetThrows) {
  try {
    SequenceNll(InitParams(SmallConfig(0)), Pair("p", ""));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySnippet);
  }
}

TEST(SequenceNllTest, MatchesPerPositionRecomputation) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const LmParams p = InitParams(LmConfig{Vocabulary::kSize, 3, 1 + static_cast<int>(rng() % 6), 5, rng()});
    std::string code(1 + rng() % 30, ' ');
    for (auto& ch : code) ch = static_cast<char>('a' + rng() % 26);
    const PromptCodePair pair = Pair("prompt" + std::to_string(trial), code);
    const JoinedSequence j = JoinPromptAndSnippet(pair.prompt, code);
    double nll = 0.0;
    for (std::size_t pos = j.target_begin; pos < j.tokens.size(); ++pos) {
      const auto ctx = ContextAt(j.tokens, pos, p.config().context_window);
      nll -= std::log(Forward(p, ctx)[static_cast<std::size_t>(j.tokens[pos])]);
    }
    nll /= static_cast<double>(j.tokens.size() - j.target_begin);
    EXPECT_NEAR(SequenceNll(p, pair).ce, nll, 1e-12);
  }
}

TEST(ContextTest, LeftPadsWithPad) {
  const std::vector<TokenId> t{Vocabulary::kBos, 'a', 'b'};
  EXPECT_EQ(ContextAt(t, 2, 4), (std::vector<TokenId>{Vocabulary::kPad, Vocabulary::kPad, Vocabulary::kBos, 'a'}));
}

TEST(KlTest, AnalyticFixture) {
  EXPECT_NEAR(KlDivergence(std::vector<double>{0.5, 0.5}, std::vector<double>{0.25, 0.75}), 0.14384103622589042,
              1e-12);
}

TEST(KlTest, NonNegativeAndZeroAtEquality) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng() % 20;
    std::vector<double> p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = u(rng);
      q[i] = u(rng);
    }
    const double sp = std::accumulate(p.begin(), p.end(), 0.0), sq = std::accumulate(q.begin(), q.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    ASSERT_GE(KlDivergence(p, q), 0.0);
    ASSERT_EQ(KlDivergence(p, p), 0.0);
  }
}

TEST(StructuralKlTest, ZeroCases) {
  const LmParams a = InitParams(SmallConfig(1));
  const LmParams b = InitParams(SmallConfig(2));
  const PromptCodePair pair = Pair("p", "def f():\n    return 1\n");
  const auto spans = minilang::ExtractStructuralTokens(pair.snippet.source);
  EXPECT_EQ(StructuralKl(a, a, pair, spans), 0.0);
  EXPECT_EQ(StructuralKl(a, b, pair, {}), 0.0);
  EXPECT_GT(StructuralKl(a, b, pair, spans), 0.0);
}

TEST(MakeExampleTest, MaskCoversStructuralBytesOnly) {
  const PromptCodePair pair = Pair("p", "x = 1\nif x:\n    y = 2\n");
  const TrainingExample ex = MakeExample(pair);
  ASSERT_EQ(ex.structural.size(), ex.num_targets());
  // "x = 1\n" is not structural; the if block is; EOS never is.
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(ex.structural[i], 0) << i;
  EXPECT_EQ(ex.structural[6], 1);
  EXPECT_EQ(ex.structural.back(), 0);
}

TEST(GradientTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 4; ++i) {
    const testing::GradientDraw d = testing::RandomGradientDraw(rng, i);
    EXPECT_LE(testing::MaxGradientError(d.current, d.reference, d.example, d.lambda), 1e-4) << "lambda " << d.lambda;
  }
}

TEST(GradientTest, LambdaZeroIsCeOnlyAndIgnoresReference) {
  const LmParams cur = InitParams(SmallConfig(1));
  const TrainingExample ex = MakeExample(Pair("p", "def f():\n    return 1\n"));
  const SampleGradient a = PerSampleGradient(cur, InitParams(SmallConfig(2)), ex, 0.0);
  const SampleGradient b = PerSampleGradient(cur, InitParams(SmallConfig(3)), ex, 0.0);
  EXPECT_EQ(a.grad, b.grad);
  const TrainingExample flat = MakeExample(Pair("p", "def f():\n    return 1\n"), {});
  EXPECT_EQ(PerSampleGradient(cur, InitParams(SmallConfig(2)), flat, 5.0).grad,
            PerSampleGradient(cur, InitParams(SmallConfig(3)), flat, 5.0).grad);
}

TEST(GradientTest, LossIdentity) {
  const LmParams cur = InitParams(SmallConfig(1));
  const LmParams ref = InitParams(SmallConfig(2));
  const TrainingExample ex = MakeExample(Pair("p", "for i in range(3):\n    print(i)\n"));
  const LossBreakdown l = PerSampleGradient(cur, ref, ex, 7.5).loss;
  EXPECT_NEAR(l.total, l.ce + 7.5 * l.kl, 1e-9);
  EXPECT_GE(l.ce, 0.0);
  EXPECT_GE(l.kl, 0.0);
  const LossBreakdown f = ExampleLoss(cur, ref, ex, 7.5);
  EXPECT_NEAR(f.total, l.total, 1e-12);
}

TEST(BatchGradientsTest, ParallelMatchesSerialBitwise) {
  const LmParams cur = InitParams(SmallConfig(1));
  const LmParams ref = InitParams(SmallConfig(2));
  std::vector<TrainingExample> batch;
  for (int i = 0; i < 12; ++i) {
    batch.push_back(MakeExample(Pair("p" + std::to_string(i), "def f():\n    return " + std::to_string(i) + "\n")));
  }
  const auto par = BatchGradients(cur, ref, batch, 3.0);
  const auto ser = BatchGradientsSerial(cur, ref, batch, 3.0);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) EXPECT_EQ(par[i].grad, ser[i].grad);
}

TEST(CheckpointTest, BitExactRoundTrip) {
  const LmParams p = InitParams(SmallConfig(8));
  const CheckpointStamp stamp{0x1234, 3.5, 1e-5};
  const Checkpoint back = DecodeCheckpoint(EncodeCheckpoint(p, stamp));
  EXPECT_EQ(back.params, p);
  EXPECT_EQ(back.params.config(), p.config());
  EXPECT_EQ(back.stamp, stamp);
  const CheckpointStamp open{7, std::numeric_limits<double>::infinity(), 0.0};
  EXPECT_EQ(DecodeCheckpoint(EncodeCheckpoint(p, open)).stamp, open);
}

TEST(CheckpointTest, CorruptInputRejected) {
  std::string bytes = EncodeCheckpoint(InitParams(SmallConfig(8)), {});
  bytes[0] = 'X';
  EXPECT_THROW(DecodeCheckpoint(bytes), Error);
  EXPECT_THROW(DecodeCheckpoint(EncodeCheckpoint(InitParams(SmallConfig(8)), {}).substr(0, 40)), Error);
}

}  // namespace
}  // namespace privforge
