//
// Copyright 2026 The tanscale Authors
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
//

// Renyi-DP accounting for DP-SGD with Poisson subsampling.
//
// For an integer order alpha >= 2, one step of the subsampled Gaussian
// mechanism with sampling rate q and noise multiplier sigma is
// (alpha, g_alpha)-RDP with
//
//   g_alpha = 1/(alpha-1) * log sum_{k=0}^{alpha} C(alpha,k) (1-q)^(alpha-k)
//                                                 q^k exp(k(k-1)/(2 sigma^2)).
//
// RDP composes additively over steps, and S steps convert to (eps, delta)-DP
// through eps = min_alpha S * g_alpha + log(1/delta)/(alpha-1).

#ifndef TANSCALE_ACCOUNTANT_H_
#define TANSCALE_ACCOUNTANT_H_

#include <math.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tanscale/errors.h"
#include "tanscale/privacy_params.h"

namespace tanscale {

struct OrderRdp {
  int order = 0;
  double rdp = 0.0;  // composed value S * g_alpha
};

struct RdpAccount {
  std::vector<OrderRdp> per_order;
  double epsilon = 0.0;
  int best_order = 0;
  double delta = 0.0;
  // The largest grid order attained the minimum; epsilon may be loose.
  bool grid_truncated = false;
};

namespace internal {

// Sampling rates that exceed 1 by at most this amount (B == N after floating
// division) are clamped to 1.
inline constexpr double kSamplingRateSlack = 1e-12;

inline double LogGamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // std::lgamma writes the global signgam
#else
  return std::lgamma(x);
#endif
}

inline double LogBinomial(int n, int k) {
  return LogGamma(n + 1.0) - LogGamma(k + 1.0) - LogGamma(n - k + 1.0);
}

// log(exp(y) - 1) for y > 0.
inline double LogExpm1(double y) {
  if (y > 50.0) return y + std::log1p(-std::exp(-y));
  return std::log(std::expm1(y));
}

// log(1 + exp(x)).
inline double Softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double CheckedSamplingRate(double q) {
  Require(!std::isnan(q) && q >= 0.0 && q <= 1.0 + kSamplingRateSlack, "q",
          "sampling rate must lie in [0, 1]");
  return std::min(q, 1.0);
}

inline void CheckSigmaAndOrder(double sigma, int alpha) {
  Require(std::isfinite(sigma) && sigma > 0, "sigma",
          "noise multiplier must be positive");
  Require(alpha >= 2, "alpha", "Renyi order must be an integer >= 2");
}

}  // namespace internal

// Per-step RDP g_alpha(sigma, q) of the Poisson-subsampled Gaussian mechanism.
//
// Evaluated in log space. Since the binomial weights sum to one, the k = 0 and
// k = 1 terms cancel against the leading 1 and
//
//   exp((alpha-1) g_alpha) - 1 = sum_{k>=2} C(alpha,k) (1-q)^(alpha-k) q^k
//                                          (exp(k(k-1)/(2 sigma^2)) - 1),
//
// a sum of positive terms. Taking log-sum-exp of that sum keeps full relative
// precision both when g_alpha is tiny (small q, large sigma) and when the
// exponent k(k-1)/(2 sigma^2) is far beyond the double range.
inline double RdpOfStep(double q, double sigma, int alpha) {
  q = internal::CheckedSamplingRate(q);
  internal::CheckSigmaAndOrder(sigma, alpha);

  const double two_var = 2.0 * sigma * sigma;
  const double a = alpha;
  internal::Require(std::isfinite(a * (a - 1.0) / two_var), "sigma",
                    "alpha(alpha-1)/(2 sigma^2) exceeds the representable "
                    "exponent range");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return a / two_var;

  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(alpha) - 1);
  double max_term = -std::numeric_limits<double>::infinity();
  for (int k = 2; k <= alpha; ++k) {
    const double kk = k;
    const double t = internal::LogBinomial(alpha, k) + kk * log_q +
                     (a - kk) * log_1mq +
                     internal::LogExpm1(kk * (kk - 1.0) / two_var);
    terms.push_back(t);
    max_term = std::max(max_term, t);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  const double log_excess = max_term + std::log(sum);
  return std::max(0.0, internal::Softplus(log_excess) / (a - 1.0));
}

// Composes S steps over `grid` and converts to (eps, delta)-DP. Ties in the
// minimization go to the smallest order.
inline RdpAccount EpsilonRdp(double q, double sigma, std::int64_t steps,
                             double delta, const AlphaGrid& grid) {
  internal::Require(steps >= 1, "S", "number of steps must be >= 1");
  internal::Require(delta > 0 && delta < 1, "delta",
                    "delta must lie in (0, 1)");
  RdpAccount account;
  account.delta = delta;
  account.epsilon = std::numeric_limits<double>::infinity();
  account.per_order.reserve(grid.orders().size());
  const double log_inv_delta = -std::log(delta);
  const double s = static_cast<double>(steps);
  for (int alpha : grid.orders()) {
    const double composed = s * RdpOfStep(q, sigma, alpha);
    account.per_order.push_back({alpha, composed});
    const double eps = composed + log_inv_delta / (alpha - 1.0);
    if (eps < account.epsilon) {
      account.epsilon = eps;
      account.best_order = alpha;
    }
  }
  account.grid_truncated = account.best_order == grid.largest();
  return account;
}

inline RdpAccount EpsilonRdp(const PrivacyParams& params,
                             const AlphaGrid& grid = AlphaGrid::Default()) {
  params.Validate();
  return EpsilonRdp(params.sampling_rate(), params.noise_multiplier,
                    params.steps, params.delta, grid);
}

// g_alpha / (alpha * eta_step^2) with eta_step = q / (sqrt(2) sigma). Close to
// one in the large-noise regime where eps_TAN approximates eps_RDP.
inline double RatioDiagnostic(double q, double sigma, int alpha) {
  q = internal::CheckedSamplingRate(q);
  internal::Require(q > 0, "q", "sampling rate must be positive");
  internal::CheckSigmaAndOrder(sigma, alpha);
  return RdpOfStep(q, sigma, alpha) /
         (alpha * q * q / (2.0 * sigma * sigma));
}

// True when q * alpha * exp(alpha / (2 sigma^2)) < 1, the regime in which
// g_alpha = O(alpha q^2 / sigma^2). Evaluated in log space.
inline bool ValidityCheck(double q, double sigma, int alpha) {
  q = internal::CheckedSamplingRate(q);
  internal::CheckSigmaAndOrder(sigma, alpha);
  if (q == 0.0) return true;
  return std::log(q) + std::log(static_cast<double>(alpha)) +
             alpha / (2.0 * sigma * sigma) <
         0.0;
}

}  // namespace tanscale

#endif  // TANSCALE_ACCOUNTANT_H_
