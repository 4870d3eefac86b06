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

#include "privforge/privsa.h"

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "privforge/error.h"

namespace privforge {
namespace {

Dataset TinyDataset() {
  Dataset ds;
  ds.id = "tiny";
  for (int i = 0; i < 8; ++i) {
    PromptCodePair p;
    p.prompt = "return " + std::to_string(i);
    p.snippet.source = "def f():\n    return " + std::to_string(i) + "\n";
    ds.pairs.push_back(p);
  }
  return ds;
}

LmParams SmallModel() { return InitParams(LmConfig{Vocabulary::kSize, 4, 4, 8, 11}); }

TEST(LambdaTest, PlateauSchedule) {
  const LambdaSchedule s;
  EXPECT_DOUBLE_EQ(LambdaAt(0, s), 1000.0);
  EXPECT_DOUBLE_EQ(LambdaAt(19, s), 1000.0);
  EXPECT_NEAR(LambdaAt(20, s), 818.7325657704511, 1e-9);
  EXPECT_NEAR(LambdaAt(39, s), 818.7325657704511, 1e-9);
  EXPECT_NEAR(LambdaAt(40, s), 670.323342835179, 1e-9);
  EXPECT_NEAR(LambdaAt(100000, s), 0.01, 1e-12);
  double prev = INFINITY;
  for (std::int64_t t = 0; t < 5000; t += 7) {
    const double l = LambdaAt(t, s);
    ASSERT_LE(l, prev);
    ASSERT_GE(l, s.lambda_min);
    ASSERT_LE(l, s.lambda_max);
    prev = l;
  }
  EXPECT_THROW(LambdaAt(-1, s), Error);
}

TEST(LambdaTest, ValidateRejectsBadSchedules) {
  LambdaSchedule s;
  s.step_interval = 0;
  EXPECT_THROW(s.Validate(), Error);
  s = {};
  s.lambda_min = 2000.0;
  EXPECT_THROW(s.Validate(), Error);
  s = {};
  s.decay_rate = -1.0;
  EXPECT_THROW(s.Validate(), Error);
}

TrainConfig SmallTrainConfig() {
  TrainConfig cfg;
  cfg.dp.max_steps = 30;
  cfg.dp.sampling_rate = 0.5;
  cfg.dp.noise_scale = 1.0;
  cfg.dp.clip_norm = 1.0;
  cfg.dp.rng_seed = 4;
  cfg.learning_rate = 0.1;
  return cfg;
}

TEST(PrivsaTrainTest, DeterministicGivenSeed) {
  const auto a = PrivsaTrain(TinyDataset(), SmallTrainConfig(), SmallModel());
  const auto b = PrivsaTrain(TinyDataset(), SmallTrainConfig(), SmallModel());
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.trace.steps.size(), 30u);
  TrainConfig other = SmallTrainConfig();
  other.dp.rng_seed = 5;
  EXPECT_NE(PrivsaTrain(TinyDataset(), other, SmallModel()).params, a.params);
}

TEST(PrivsaTrainTest, TraceFollowsSchedule) {
  const auto r = PrivsaTrain(TinyDataset(), SmallTrainConfig(), SmallModel());
  for (const auto& s : r.trace.steps) {
    EXPECT_DOUBLE_EQ(s.lambda, LambdaAt(s.step, LambdaSchedule{}));
    if (s.batch_size > 0) EXPECT_NEAR(s.total, s.ce + s.lambda * s.kl, 1e-9);
  }
  // The first step sees the reference itself, so KL is zero there.
  EXPECT_EQ(r.trace.steps.front().kl, 0.0);
}

TEST(PrivsaTrainTest, ReportsAccountantEpsilon) {
  const TrainConfig cfg = SmallTrainConfig();
  const auto r = PrivsaTrain(TinyDataset(), cfg, SmallModel());
  EXPECT_DOUBLE_EQ(r.trace.privacy.epsilon, ComputeEpsilon(0.5, 1.0, 30, cfg.dp.delta).epsilon);
  EXPECT_TRUE(std::isfinite(r.trace.privacy.epsilon));
}

TEST(PrivsaTrainTest, NonPrivateOrNoiselessReportsInfinity) {
  TrainConfig cfg = SmallTrainConfig();
  cfg.private_training = false;
  EXPECT_TRUE(std::isinf(PrivsaTrain(TinyDataset(), cfg, SmallModel()).trace.privacy.epsilon));
  cfg = SmallTrainConfig();
  cfg.dp.noise_scale = 0.0;
  EXPECT_TRUE(std::isinf(PrivsaTrain(TinyDataset(), cfg, SmallModel()).trace.privacy.epsilon));
}

TEST(PrivsaTrainTest, ZeroStepsIsIdentity) {
  TrainConfig cfg = SmallTrainConfig();
  cfg.dp.max_steps = 0;
  const auto r = PrivsaTrain(TinyDataset(), cfg, SmallModel());
  EXPECT_EQ(r.params, SmallModel());
  EXPECT_EQ(r.trace.privacy.epsilon, 0.0);
}

TEST(PrivsaTrainTest, EmptyDatasetThrows) {
  EXPECT_THROW(PrivsaTrain(Dataset{}, SmallTrainConfig(), SmallModel()), Error);
}

TEST(PrivsaTrainTest, KlTermHoldsModelNearReference) {
  // Same noiseless run, with and without the structural penalty.
  TrainConfig anchored = SmallTrainConfig();
  anchored.private_training = false;
  anchored.dp.max_steps = 60;
  anchored.schedule = LambdaSchedule{50.0, 50.0, 1.0, 1};
  TrainConfig free = anchored;
  free.schedule = LambdaSchedule{0.0, 0.0, 1.0, 1};
  const auto a = PrivsaTrain(TinyDataset(), anchored, SmallModel());
  const auto f = PrivsaTrain(TinyDataset(), free, SmallModel());
  EXPECT_LT(a.trace.steps.back().kl, f.trace.steps.back().kl);
}

TEST(PlainTrainTest, LossDecreases) {
  const auto r = PlainTrain(TinyDataset(), PlainTrainConfig{30, 4, 0.01, 1}, SmallModel());
  ASSERT_EQ(r.epoch_loss.size(), 30u);
  EXPECT_LT(r.epoch_loss.back(), 0.5 * r.epoch_loss.front());
}

TEST(PlainTrainTest, EmptyDatasetIsNoop) {
  EXPECT_EQ(PlainTrain(Dataset{}, PlainTrainConfig{}, SmallModel()).params, SmallModel());
}

}  // namespace
}  // namespace privforge
