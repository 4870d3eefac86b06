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

#ifndef PRIVFORGE_PRIVSA_H_
#define PRIVFORGE_PRIVSA_H_

#include <cstdint>
#include <vector>

#include "privforge/corpus.h"
#include "privforge/lm.h"
#include "privforge/privacy.h"

namespace privforge {

// lambda(t) = min + (max - min) * exp(-decay * floor(t / interval) * interval)
struct LambdaSchedule {
  double lambda_max = 1000.0;
  double lambda_min = 0.01;
  double decay_rate = 0.01;
  std::int64_t step_interval = 20;

  void Validate() const;
};

double LambdaAt(std::int64_t step, const LambdaSchedule& schedule);

struct TrainConfig {
  LambdaSchedule schedule;
  DpConfig dp;
  double learning_rate = 0.05;
  // When false: no clipping, no noise, and the report carries epsilon = inf.
  bool private_training = true;

  void Validate() const;
};

struct StepRecord {
  std::int64_t step = 0;
  double lambda = 0.0;
  double ce = 0.0;
  double kl = 0.0;
  double total = 0.0;
  std::size_t batch_size = 0;
  double grad_norm_mean = 0.0;
  double grad_norm_max = 0.0;
};

struct TrainTrace {
  std::vector<StepRecord> steps;
  PrivacyReport privacy;
};

struct TrainResult {
  LmParams params;
  TrainTrace trace;
};

// Frozen copy of the model at fine-tuning start.
LmParams SnapshotReference(const LmParams& current);

// DP-SGD fine-tuning with the structural KL regularizer. Each step:
// Poisson-sample a batch with rate q, compute per-sample gradients of
// L_CE + lambda(t) * L_KL, clip, add noise, update. Loss averages use the
// expected batch size q*N so empty batches are noise-only steps.
TrainResult PrivsaTrain(const Dataset& ds, const TrainConfig& cfg, const LmParams& init);

// Same loop on pre-built examples.
TrainResult PrivsaTrain(const std::vector<TrainingExample>& examples, const TrainConfig& cfg,
                        const LmParams& init);

// Non-private minibatch training with Adam on the cross-entropy loss.
struct PlainTrainConfig {
  int epochs = 10;
  int batch_size = 16;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;
};

struct PlainTrainResult {
  LmParams params;
  std::vector<double> epoch_loss;
};

PlainTrainResult PlainTrain(const Dataset& ds, const PlainTrainConfig& cfg, const LmParams& init);

}  // namespace privforge

#endif  // PRIVFORGE_PRIVSA_H_
