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

// Renyi-DP accounting for the Poisson-subsampled Gaussian mechanism.

#include <algorithm>
#include <cmath>
#include <limits>

#include "privforge/error.h"
#include "privforge/privacy.h"

namespace privforge {
namespace {

constexpr int kMinOrder = 2;
constexpr int kMaxOrder = 256;
constexpr double kSigmaSearchLow = 0.05;
constexpr double kSigmaSearchHigh = 1000.0;
constexpr double kSigmaTolerance = 1e-3;

// log sum_{k=0}^{alpha} C(alpha,k) (1-q)^(alpha-k) q^k exp(k(k-1) / (2 sigma^2))
double LogMomentInteger(double q, double sigma, int alpha) {
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(alpha) + 1);
  for (int k = 0; k <= alpha; ++k) {
    double t = std::lgamma(alpha + 1.0) - std::lgamma(k + 1.0) - std::lgamma(alpha - k + 1.0);
    if (k > 0) t += k * log_q;
    if (alpha - k > 0) t += (alpha - k) * log_1mq;  // -inf when q == 1
    t += static_cast<double>(k) * (k - 1) * inv_two_var;
    terms.push_back(t);
    max_term = std::max(max_term, t);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum);
}

}  // namespace

std::vector<int> DefaultRdpOrders() {
  std::vector<int> orders;
  for (int a = kMinOrder; a <= kMaxOrder; ++a) orders.push_back(a);
  return orders;
}

RdpCurve RdpSubsampledGaussian(double q, double sigma, std::int64_t steps,
                               std::span<const int> orders) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kSigmaZero, "noise scale must be > 0");
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "q must be in (0, 1]");
  if (steps < 0) throw Error(ErrorCode::kInvalidArgument, "steps must be >= 0");
  RdpCurve curve;
  curve.orders.assign(orders.begin(), orders.end());
  curve.values.reserve(orders.size());
  for (int alpha : orders) {
    if (alpha < 2) throw Error(ErrorCode::kInvalidArgument, "RDP orders must be integers >= 2");
    double per_step = LogMomentInteger(q, sigma, alpha) / (alpha - 1);
    per_step = std::max(per_step, 0.0);
    curve.values.push_back(static_cast<double>(steps) * per_step);
  }
  return curve;
}

RdpCurve RdpSubsampledGaussian(double q, double sigma, std::int64_t steps) {
  const std::vector<int> orders = DefaultRdpOrders();
  return RdpSubsampledGaussian(q, sigma, steps, orders);
}

PrivacyReport RdpToEpsilon(const RdpCurve& curve, double delta, EpsilonConversion conversion) {
  if (curve.orders.empty() || curve.orders.size() != curve.values.size()) {
    throw Error(ErrorCode::kInvalidArgument, "RDP curve is empty or inconsistent");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be in (0, 1)");
  PrivacyReport best;
  best.delta = delta;
  best.epsilon = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.orders.size(); ++i) {
    const double a = curve.orders[i];
    double eps = 0.0;
    if (conversion == EpsilonConversion::kClassic) {
      eps = curve.values[i] + std::log(1.0 / delta) / (a - 1.0);
    } else {
      eps = curve.values[i] + std::log1p(-1.0 / a) - (std::log(delta) + std::log(a)) / (a - 1.0);
    }
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.best_order = curve.orders[i];
    }
  }
  best.epsilon = std::max(best.epsilon, 0.0);
  return best;
}

PrivacyReport ComputeEpsilon(double q, double sigma, std::int64_t steps, double delta,
                             EpsilonConversion conversion) {
  return RdpToEpsilon(RdpSubsampledGaussian(q, sigma, steps), delta, conversion);
}

double CalibrateSigma(double q, std::int64_t steps, double delta, double target_eps,
                      EpsilonConversion conversion) {
  if (!(target_eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "target epsilon must be > 0");
  auto eps_at = [&](double sigma) { return ComputeEpsilon(q, sigma, steps, delta, conversion).epsilon; };
  double lo = kSigmaSearchLow, hi = kSigmaSearchHigh;
  if (eps_at(hi) > target_eps) {
    throw Error(ErrorCode::kUnreachable, "target epsilon not reachable with sigma <= 1000");
  }
  if (eps_at(lo) <= target_eps) return lo;
  // Invariant: eps(lo) > target >= eps(hi).
  while (hi - lo > kSigmaTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (eps_at(mid) <= target_eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace privforge
