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

// Constant-TAN experiment planning.
//
// Three families of configurations derived from a reference run:
//
//  * batch-scaled: (B, sigma) scaled together at fixed S. eta_step and hence
//    the per-step signal-to-noise ratio are unchanged while compute drops by
//    B_ref / B. These are cheap utility simulations, not privacy claims.
//  * step-scaled: sigma fixed, B^2 traded against S at constant eta, learning
//    rate scaled inversely to S.
//  * data-scaled: N multiplied by beta with (B, sigma, S) fixed and delta
//    divided by beta; the global ratio N * eta stays constant.

#ifndef TANSCALE_PLANNER_H_
#define TANSCALE_PLANNER_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tanscale/accountant.h"
#include "tanscale/errors.h"
#include "tanscale/privacy_params.h"
#include "tanscale/tan.h"

namespace tanscale {

struct ReferenceConfig {
  PrivacyParams privacy;
  double learning_rate = 1.0;

  void Validate() const {
    privacy.Validate();
    internal::Require(std::isfinite(learning_rate) && learning_rate > 0,
                      "learning_rate", "learning rate must be positive");
  }
};

enum class ScalingKind { kBatchScaled, kStepScaled, kDataScaled };

inline std::string_view ToString(ScalingKind kind) {
  switch (kind) {
    case ScalingKind::kBatchScaled:
      return "batch-scaled";
    case ScalingKind::kStepScaled:
      return "step-scaled";
    case ScalingKind::kDataScaled:
      return "data-scaled";
  }
  return "unknown";
}

struct ScaledConfig {
  ScalingKind kind = ScalingKind::kBatchScaled;
  PrivacyParams privacy;
  double learning_rate = 0.0;
  double compute_factor = 1.0;  // cost relative to the reference
  double epsilon = 0.0;         // eps_RDP
  int best_order = 0;
  bool grid_truncated = false;
  double eps_tan = 0.0;
  double eta = 0.0;
  double eta_step = 0.0;
  // Step-scaled: batch size before rounding to an integer.
  std::optional<double> exact_batch_size;
  // Data-scaled: the global signal-to-noise ratio N * eta.
  std::optional<double> global_snr;
  // Batch-scaled configs are utility proxies; their epsilon is not a claim
  // about the reference run.
  bool simulation_only = false;
};

struct ScalingPlan {
  ReferenceConfig reference;
  std::vector<ScaledConfig> configs;
};

namespace internal {

inline void FillAccounting(ScaledConfig& c, const AlphaGrid& grid) {
  const RdpAccount account = EpsilonRdp(c.privacy, grid);
  c.epsilon = account.epsilon;
  c.best_order = account.best_order;
  c.grid_truncated = account.grid_truncated;
  const double q = c.privacy.sampling_rate();
  c.eta = Eta(q, c.privacy.noise_multiplier, c.privacy.steps);
  c.eta_step = EtaStep(q, c.privacy.noise_multiplier);
  c.eps_tan = EpsTan(c.eta, c.privacy.delta);
}

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// handled by exactly one worker, so results written by index are identical to
// a sequential pass.
template <typename Body>
void ParallelFor(std::size_t n, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) body(i);
    });
  }
}

}  // namespace internal

// sigma' = sigma_ref * B' / B_ref with S, N, delta and lr unchanged.
inline ScaledConfig BatchScaled(const ReferenceConfig& ref,
                                std::int64_t target_batch,
                                const AlphaGrid& grid = AlphaGrid::Default()) {
  ref.Validate();
  internal::Require(
      target_batch >= 1 && target_batch <= ref.privacy.dataset_size,
      "target_batch", "target batch size must lie in [1, N]");
  ScaledConfig c;
  c.kind = ScalingKind::kBatchScaled;
  c.privacy = ref.privacy;
  c.privacy.batch_size = target_batch;
  c.privacy.noise_multiplier =
      ref.privacy.noise_multiplier * static_cast<double>(target_batch) /
      static_cast<double>(ref.privacy.batch_size);
  c.learning_rate = ref.learning_rate;
  c.compute_factor = static_cast<double>(target_batch) /
                     static_cast<double>(ref.privacy.batch_size);
  c.simulation_only = true;
  internal::FillAccounting(c, grid);
  return c;
}

// B' = round(B_ref sqrt(S_ref / S')), sigma unchanged, lr' = lr_ref S_ref / S'.
inline ScaledConfig StepScaled(const ReferenceConfig& ref,
                               std::int64_t target_steps,
                               const AlphaGrid& grid = AlphaGrid::Default()) {
  ref.Validate();
  internal::Require(target_steps >= 1, "target_steps",
                    "target number of steps must be >= 1");
  const double ratio = static_cast<double>(ref.privacy.steps) /
                       static_cast<double>(target_steps);
  const double exact_batch =
      static_cast<double>(ref.privacy.batch_size) * std::sqrt(ratio);
  const double rounded = std::round(exact_batch);
  if (rounded < 1.0 ||
      rounded > static_cast<double>(ref.privacy.dataset_size)) {
    throw InfeasibleError("step-scaled batch size " + std::to_string(rounded) +
                          " for S=" + std::to_string(target_steps) +
                          " is outside [1, N]");
  }
  ScaledConfig c;
  c.kind = ScalingKind::kStepScaled;
  c.privacy = ref.privacy;
  c.privacy.batch_size = static_cast<std::int64_t>(rounded);
  c.privacy.steps = target_steps;
  c.learning_rate = ref.learning_rate * ratio;
  c.compute_factor = rounded * static_cast<double>(target_steps) /
                     (static_cast<double>(ref.privacy.batch_size) *
                      static_cast<double>(ref.privacy.steps));
  c.exact_batch_size = exact_batch;
  internal::FillAccounting(c, grid);
  return c;
}

// N' = floor(beta N) (tolerant to floating noise), delta' = delta / beta.
inline ScaledConfig DataScaled(const ReferenceConfig& ref, double beta,
                               const AlphaGrid& grid = AlphaGrid::Default()) {
  ref.Validate();
  internal::Require(std::isfinite(beta) && beta > 0, "beta",
                    "beta must be positive");
  const double scaled = beta * static_cast<double>(ref.privacy.dataset_size);
  const double n = std::floor(scaled * (1.0 + 1e-12));
  internal::Require(n >= static_cast<double>(ref.privacy.batch_size), "beta",
                    "scaled dataset is smaller than the batch size");
  const double delta = ref.privacy.delta / beta;
  internal::Require(delta < 1.0, "beta", "scaled delta must stay below 1");
  ScaledConfig c;
  c.kind = ScalingKind::kDataScaled;
  c.privacy = ref.privacy;
  c.privacy.dataset_size = static_cast<std::int64_t>(n);
  c.privacy.delta = delta;
  c.learning_rate = ref.learning_rate;
  // One epoch is N / B steps; the total work for fixed (B, S) is unchanged.
  c.compute_factor = 1.0;
  internal::FillAccounting(c, grid);
  c.global_snr = static_cast<double>(c.privacy.dataset_size) * c.eta;
  return c;
}

struct SweepRow {
  std::int64_t steps = 0;
  double sigma = 0.0;
  double q = 0.0;
  double eps_rdp = 0.0;
  int best_order = 0;
  double eps_tan = 0.0;
  bool valid = false;  // validity criterion at the minimizing order
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<double> skipped_sigmas;  // q would exceed 1
};

// Synthetic dataset size used to express the sweep's sampling rate as B / N.
inline constexpr std::int64_t kSweepDenominator = 1'000'000'000;

// Evaluates eps_RDP along sigma_grid at fixed (eta, S), with
// q = eta sqrt(2) sigma / sqrt(S). Points with q > 1 are skipped. The eps_TAN
// column depends on (eta, delta) only and is constant.
inline SweepResult PrivacyWallSweep(double eta, double delta,
                                    std::int64_t steps,
                                    const std::vector<double>& sigma_grid,
                                    const AlphaGrid& grid = AlphaGrid::Default(),
                                    unsigned threads = 1) {
  internal::Require(std::isfinite(eta) && eta > 0, "eta",
                    "eta must be positive");
  internal::Require(steps >= 1, "steps", "number of steps must be >= 1");
  internal::Require(!sigma_grid.empty(), "sigma", "sigma grid is empty");
  for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
    internal::Require(std::isfinite(sigma_grid[i]) && sigma_grid[i] > 0,
                      "sigma", "sigma values must be positive");
    if (i > 0) {
      internal::Require(sigma_grid[i] > sigma_grid[i - 1], "sigma",
                        "sigma grid must be increasing");
    }
  }
  const double eps_tan = EpsTan(eta, delta);

  SweepResult result;
  std::vector<PrivacyParams> feasible;
  for (double sigma : sigma_grid) {
    const double q = eta * std::numbers::sqrt2 * sigma /
                     std::sqrt(static_cast<double>(steps));
    const auto b = static_cast<std::int64_t>(
        std::round(q * static_cast<double>(kSweepDenominator)));
    if (q > 1.0 || b < 1) {
      result.skipped_sigmas.push_back(sigma);
      continue;
    }
    feasible.push_back({kSweepDenominator, b, steps, sigma, delta});
  }
  if (feasible.empty()) {
    throw InfeasibleError("empty sweep: every sigma implies q > 1");
  }

  result.rows.resize(feasible.size());
  internal::ParallelFor(feasible.size(), threads, [&](std::size_t i) {
    const PrivacyParams& p = feasible[i];
    const RdpAccount account = EpsilonRdp(p, grid);
    SweepRow& row = result.rows[i];
    row.steps = steps;
    row.sigma = p.noise_multiplier;
    row.q = p.sampling_rate();
    row.eps_rdp = account.epsilon;
    row.best_order = account.best_order;
    row.eps_tan = eps_tan;
    row.valid = ValidityCheck(row.q, row.sigma, account.best_order);
  });
  return result;
}

}  // namespace tanscale

#endif  // TANSCALE_PLANNER_H_
