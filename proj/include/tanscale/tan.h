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

// Total Amount of Noise (TAN) quantities.
//
// The individual signal-to-noise ratio of S noisy steps is
// eta^2 = q^2 S / (2 sigma^2) = S * eta_step^2, and TAN is its inverse 1/eta.
// Substituting g_alpha ~ alpha * eta_step^2 into the RDP conversion and
// minimizing over a continuous alpha gives the closed-form budget
// eps_TAN = eta^2 + 2 eta sqrt(log(1/delta)). All logarithms are natural.

#ifndef TANSCALE_TAN_H_
#define TANSCALE_TAN_H_

#include <cmath>
#include <numbers>

#include "tanscale/errors.h"
#include "tanscale/privacy_params.h"

namespace tanscale {

struct TanSummary {
  double eta = 0.0;
  double eta_step = 0.0;
  double total_noise = 0.0;  // 1 / eta
  double eps_tan = 0.0;
  double gdp_mu = 0.0;
  double gdp_mu_large_sigma = 0.0;  // sqrt(2) * eta, the sigma -> inf limit
  double tcdp_omega = 0.0;
};

inline double EtaStep(double q, double sigma) {
  return q / (std::numbers::sqrt2 * sigma);
}

inline double Eta(double q, double sigma, std::int64_t steps) {
  return std::sqrt(q * q * static_cast<double>(steps) / (2.0 * sigma * sigma));
}

inline double Eta(const PrivacyParams& params) {
  params.Validate();
  return Eta(params.sampling_rate(), params.noise_multiplier, params.steps);
}

inline double EpsTan(double eta, double delta) {
  internal::Require(std::isfinite(eta) && eta >= 0, "eta",
                    "eta must be non-negative");
  internal::Require(delta > 0 && delta < 1, "delta",
                    "delta must lie in (0, 1)");
  return eta * eta + 2.0 * eta * std::sqrt(-std::log(delta));
}

// Gaussian-DP parameter q * sqrt(S (exp(1/sigma^2) - 1)) under the central
// limit approximation. Tends to sqrt(2) * eta for large sigma.
inline double GdpMu(double q, double sigma, std::int64_t steps) {
  return q * std::sqrt(static_cast<double>(steps) *
                       std::expm1(1.0 / (sigma * sigma)));
}

inline double GdpMu(const PrivacyParams& params) {
  params.Validate();
  return GdpMu(params.sampling_rate(), params.noise_multiplier, params.steps);
}

// Smallest omega with log(1/delta) <= (omega - 1)^2 eta^2, so that S steps are
// approximately (eta^2, omega)-tCDP.
inline double TcdpOmega(double eta, double delta) {
  internal::Require(std::isfinite(eta) && eta > 0, "eta",
                    "eta must be positive");
  internal::Require(delta > 0 && delta < 1, "delta",
                    "delta must lie in (0, 1)");
  return 1.0 + std::sqrt(-std::log(delta)) / eta;
}

inline TanSummary Summarize(const PrivacyParams& params) {
  params.Validate();
  const double q = params.sampling_rate();
  const double sigma = params.noise_multiplier;
  TanSummary s;
  s.eta = Eta(q, sigma, params.steps);
  s.eta_step = EtaStep(q, sigma);
  s.total_noise = 1.0 / s.eta;
  s.eps_tan = EpsTan(s.eta, params.delta);
  s.gdp_mu = GdpMu(q, sigma, params.steps);
  s.gdp_mu_large_sigma = std::numbers::sqrt2 * s.eta;
  s.tcdp_omega = TcdpOmega(s.eta, params.delta);
  return s;
}

}  // namespace tanscale

#endif  // TANSCALE_TAN_H_
