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

#include <cmath>
#include <string>

#include "privforge/error.h"
#include "privforge/privacy.h"

namespace privforge {

void DpConfig::Validate() const {
  if (!(clip_norm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "clip_norm must be > 0");
  if (!(noise_scale >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise_scale must be >= 0");
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sampling_rate must be in (0, 1]");
  }
  if (max_steps < 0) throw Error(ErrorCode::kInvalidArgument, "max_steps must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be in (0, 1)");
}

double L2Norm(std::span<const double> v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  return std::sqrt(ss);
}

double ClipGradientInPlace(std::span<double> g, double clip_norm) {
  if (!(clip_norm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "clip norm must be > 0");
  const double norm = L2Norm(g);
  if (!std::isfinite(norm)) throw Error(ErrorCode::kNonFiniteGradient, "gradient norm is not finite");
  if (norm > clip_norm) {
    const double scale = clip_norm / norm;
    for (double& x : g) x *= scale;
    // Rounding in the rescale can leave the norm a few ulps above C.
    double after = L2Norm(g);
    while (after > clip_norm) {
      const double shrink = std::nextafter(clip_norm / after, 0.0);
      for (double& x : g) x *= shrink;
      after = L2Norm(g);
    }
  }
  return norm;
}

std::vector<double> ClipGradient(std::span<const double> g, double clip_norm) {
  std::vector<double> out(g.begin(), g.end());
  ClipGradientInPlace(out, clip_norm);
  return out;
}

std::vector<std::size_t> PoissonSample(std::size_t n, double q, Rng& rng) {
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "q must be in (0, 1]");
  std::vector<std::size_t> picked;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    // One draw per index regardless of q keeps the stream layout fixed.
    if (unit(rng) < q) picked.push_back(i);
  }
  return picked;
}

namespace {

void AddNoise(std::span<double> acc, double stddev, Rng& rng) {
  if (stddev == 0.0) return;
  std::normal_distribution<double> gauss(0.0, stddev);
  for (double& x : acc) x += gauss(rng);
}

}  // namespace

std::vector<double> NoisyAggregate(std::span<const std::vector<double>> clipped,
                                   double clip_norm, double sigma, Rng& rng,
                                   std::optional<double> denominator) {
  if (clipped.empty()) throw Error(ErrorCode::kEmptyBatch, "no gradients to aggregate");
  if (!(sigma >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be >= 0");
  const std::size_t dim = clipped.front().size();
  std::vector<double> acc(dim, 0.0);
  for (const auto& g : clipped) {
    if (g.size() != dim) throw Error(ErrorCode::kInvalidArgument, "gradient sizes differ");
    for (std::size_t k = 0; k < dim; ++k) acc[k] += g[k];
  }
  AddNoise(acc, sigma * clip_norm, rng);
  const double denom = denominator.value_or(static_cast<double>(clipped.size()));
  if (!(denom > 0.0)) throw Error(ErrorCode::kInvalidArgument, "denominator must be > 0");
  for (double& x : acc) x /= denom;
  return acc;
}

std::vector<double> NoiseOnlyAggregate(std::size_t dim, double clip_norm, double sigma,
                                       double denominator, Rng& rng) {
  if (!(denominator > 0.0)) throw Error(ErrorCode::kInvalidArgument, "denominator must be > 0");
  std::vector<double> acc(dim, 0.0);
  AddNoise(acc, sigma * clip_norm, rng);
  for (double& x : acc) x /= denominator;
  return acc;
}

void DpSgdStep(std::span<double> params, std::span<const std::vector<double>> per_sample,
               const DpConfig& cfg, double learning_rate, Rng& rng,
               std::optional<double> denominator) {
  cfg.Validate();
  std::vector<std::vector<double>> clipped(per_sample.begin(), per_sample.end());
  for (auto& g : clipped) {
    if (g.size() != params.size()) throw Error(ErrorCode::kInvalidArgument, "gradient size mismatch");
    ClipGradientInPlace(g, cfg.clip_norm);
  }
  const std::vector<double> update =
      clipped.empty()
          ? NoiseOnlyAggregate(params.size(), cfg.clip_norm, cfg.noise_scale,
                               denominator.value_or(0.0), rng)
          : NoisyAggregate(clipped, cfg.clip_norm, cfg.noise_scale, rng, denominator);
  for (std::size_t k = 0; k < params.size(); ++k) params[k] -= learning_rate * update[k];
}

}  // namespace privforge
