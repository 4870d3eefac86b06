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

#ifndef PRIVFORGE_PRIVACY_H_
#define PRIVFORGE_PRIVACY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace privforge {

// The single RNG stream used by training. Draw order per step: subsampling
// decisions first, then noise.
using Rng = std::mt19937_64;

struct DpConfig {
  double clip_norm = 1.0;
  // Noise multiplier: per-coordinate noise std is noise_scale * clip_norm.
  double noise_scale = 0.0;
  double sampling_rate = 1.0;
  std::int64_t max_steps = 0;
  double delta = 1e-5;
  std::uint64_t rng_seed = 0;

  void Validate() const;
};

struct RdpCurve {
  std::vector<int> orders;
  std::vector<double> values;
};

struct PrivacyReport {
  double epsilon = 0.0;
  double delta = 0.0;
  int best_order = 0;
};

enum class EpsilonConversion {
  // eps = rdp + log(1/delta) / (alpha - 1)
  kClassic,
  // eps = rdp + log((alpha - 1) / alpha) - (log(delta) + log(alpha)) / (alpha - 1)
  kImproved,
};

double L2Norm(std::span<const double> v);

// g / max(1, |g|_2 / C). Vectors already within C are returned unchanged.
std::vector<double> ClipGradient(std::span<const double> g, double clip_norm);
// In-place variant; returns the pre-clip norm.
double ClipGradientInPlace(std::span<double> g, double clip_norm);

// Each index in [0, n) independently with probability q, in ascending order.
std::vector<std::size_t> PoissonSample(std::size_t n, double q, Rng& rng);

// (sum of clipped + N(0, (sigma*C)^2 I)) / denominator. The denominator
// defaults to the batch size; pass the expected batch size to match the
// Poisson-subsampled analysis.
std::vector<double> NoisyAggregate(std::span<const std::vector<double>> clipped,
                                   double clip_norm, double sigma, Rng& rng,
                                   std::optional<double> denominator = std::nullopt);

// Noise-only aggregate for an empty Poisson batch.
std::vector<double> NoiseOnlyAggregate(std::size_t dim, double clip_norm, double sigma,
                                       double denominator, Rng& rng);

// Clip each gradient, noisy-aggregate, then params -= lr * aggregate.
void DpSgdStep(std::span<double> params, std::span<const std::vector<double>> per_sample,
               const DpConfig& cfg, double learning_rate, Rng& rng,
               std::optional<double> denominator = std::nullopt);

// Integer orders 2..256.
std::vector<int> DefaultRdpOrders();

// RDP of `steps` compositions of the Poisson-subsampled Gaussian mechanism.
RdpCurve RdpSubsampledGaussian(double q, double sigma, std::int64_t steps,
                               std::span<const int> orders);
RdpCurve RdpSubsampledGaussian(double q, double sigma, std::int64_t steps);

PrivacyReport RdpToEpsilon(const RdpCurve& curve, double delta,
                           EpsilonConversion conversion = EpsilonConversion::kClassic);

// Convenience: accountant report for a DP-SGD run.
PrivacyReport ComputeEpsilon(double q, double sigma, std::int64_t steps, double delta,
                             EpsilonConversion conversion = EpsilonConversion::kClassic);

// Smallest sigma (to 1e-3) whose epsilon is <= target_eps. Throws kUnreachable
// when even the upper end of the search interval is not enough.
double CalibrateSigma(double q, std::int64_t steps, double delta, double target_eps,
                      EpsilonConversion conversion = EpsilonConversion::kClassic);

}  // namespace privforge

#endif  // PRIVFORGE_PRIVACY_H_
