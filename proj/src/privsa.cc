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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "privforge/error.h"

namespace privforge {

void LambdaSchedule::Validate() const {
  if (!(lambda_max >= lambda_min && lambda_min >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need lambda_max >= lambda_min >= 0");
  }
  if (!(decay_rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "decay_rate must be > 0");
  if (step_interval < 1) throw Error(ErrorCode::kInvalidArgument, "step_interval must be >= 1");
}

double LambdaAt(std::int64_t step, const LambdaSchedule& s) {
  if (step < 0) throw Error(ErrorCode::kInvalidArgument, "step must be >= 0");
  const std::int64_t plateau_start = (step / s.step_interval) * s.step_interval;
  const double lambda = s.lambda_min + (s.lambda_max - s.lambda_min) *
                                           std::exp(-s.decay_rate * static_cast<double>(plateau_start));
  return std::clamp(lambda, s.lambda_min, s.lambda_max);
}

void TrainConfig::Validate() const {
  schedule.Validate();
  dp.Validate();
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning_rate must be > 0");
}

LmParams SnapshotReference(const LmParams& current) { return current; }

TrainResult PrivsaTrain(const std::vector<TrainingExample>& examples, const TrainConfig& cfg,
                        const LmParams& init) {
  cfg.Validate();
  if (examples.empty()) throw Error(ErrorCode::kInvalidArgument, "training set is empty");
  const LmParams reference = SnapshotReference(init);
  TrainResult result{init, {}};
  Rng rng(cfg.dp.rng_seed);
  const double q = cfg.dp.sampling_rate;
  const double expected_batch = q * static_cast<double>(examples.size());

  std::vector<TrainingExample> batch;
  for (std::int64_t t = 0; t < cfg.dp.max_steps; ++t) {
    const double lambda = LambdaAt(t, cfg.schedule);
    const std::vector<std::size_t> picked = PoissonSample(examples.size(), q, rng);
    batch.clear();
    for (std::size_t i : picked) batch.push_back(examples[i]);

    std::vector<SampleGradient> grads = BatchGradients(result.params, reference, batch, lambda);

    StepRecord rec;
    rec.step = t;
    rec.lambda = lambda;
    rec.batch_size = batch.size();
    std::vector<std::vector<double>> per_sample;
    per_sample.reserve(grads.size());
    for (auto& g : grads) {
      rec.ce += g.loss.ce;
      rec.kl += g.loss.kl;
      const double norm = L2Norm(g.grad);
      rec.grad_norm_mean += norm;
      rec.grad_norm_max = std::max(rec.grad_norm_max, norm);
      per_sample.push_back(std::move(g.grad));
    }
    if (!grads.empty()) {
      const double n = static_cast<double>(grads.size());
      rec.ce /= n;
      rec.kl /= n;
      rec.grad_norm_mean /= n;
    }
    rec.total = rec.ce + lambda * rec.kl;

    if (cfg.private_training) {
      DpSgdStep(result.params.flat(), per_sample, cfg.dp, cfg.learning_rate, rng, expected_batch);
    } else if (!per_sample.empty()) {
      auto flat = result.params.flat();
      std::vector<double> mean(flat.size(), 0.0);
      for (const auto& g : per_sample) {
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += g[k];
      }
      const double n = static_cast<double>(per_sample.size());
      for (std::size_t k = 0; k < mean.size(); ++k) flat[k] -= cfg.learning_rate * (mean[k] / n);
    }
    result.trace.steps.push_back(rec);
  }

  PrivacyReport& report = result.trace.privacy;
  report.delta = cfg.dp.delta;
  if (cfg.dp.max_steps == 0) {
    report.epsilon = 0.0;
  } else if (!cfg.private_training || cfg.dp.noise_scale == 0.0) {
    report.epsilon = std::numeric_limits<double>::infinity();
  } else {
    report = ComputeEpsilon(q, cfg.dp.noise_scale, cfg.dp.max_steps, cfg.dp.delta);
  }
  return result;
}

TrainResult PrivsaTrain(const Dataset& ds, const TrainConfig& cfg, const LmParams& init) {
  std::vector<TrainingExample> examples;
  examples.reserve(ds.size());
  // Unparsable snippets keep their slot with an empty structural mask so the
  // dataset size behind q is unchanged.
  for (const auto& pair : ds.pairs) examples.push_back(MakeExample(pair));
  return PrivsaTrain(examples, cfg, init);
}

PlainTrainResult PlainTrain(const Dataset& ds, const PlainTrainConfig& cfg, const LmParams& init) {
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid plain training config");
  }
  PlainTrainResult result{init, {}};
  if (ds.empty()) return result;

  std::vector<TrainingExample> examples;
  examples.reserve(ds.size());
  for (const auto& pair : ds.pairs) examples.push_back(MakeExample(pair, {}));

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  auto flat = result.params.flat();
  std::vector<double> m(flat.size(), 0.0), v(flat.size(), 0.0), mean(flat.size());
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed);
  std::int64_t t = 0;
  std::vector<TrainingExample> batch;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(examples[order[i]]);
      const auto grads = BatchGradients(result.params, result.params, batch, 0.0);
      std::fill(mean.begin(), mean.end(), 0.0);
      for (const auto& g : grads) {
        loss_sum += g.loss.ce;
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += g.grad[k];
      }
      const double inv = 1.0 / static_cast<double>(grads.size());
      ++t;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
      for (std::size_t k = 0; k < flat.size(); ++k) {
        const double g = mean[k] * inv;
        m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g;
        v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g * g;
        flat[k] -= cfg.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + kEps);
      }
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(examples.size()));
  }
  return result;
}

}  // namespace privforge
