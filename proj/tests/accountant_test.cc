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

#include "tanscale/accountant.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "quadrature_oracle.h"

namespace tanscale {
namespace {

constexpr PrivacyParams kImageNet{1'281'167, 16'384, 72'000, 2.5, 8e-7};

TEST(RdpOfStepTest, ZeroSamplingRateIsZero) {
  EXPECT_EQ(RdpOfStep(0.0, 1.0, 5), 0.0);
}

TEST(RdpOfStepTest, FullBatchIsGaussianMechanism) {
  EXPECT_EQ(RdpOfStep(1.0, 1.0, 2), 1.0);
}

TEST(RdpOfStepTest, SamplingRateSlightlyAboveOneIsClamped) {
  EXPECT_EQ(RdpOfStep(1.0 + 1e-13, 1.0, 2), 1.0);
  EXPECT_THROW(RdpOfStep(1.0 + 1e-9, 1.0, 2), DomainError);
}

TEST(RdpOfStepTest, MatchesFrozenOracleValue) {
  // 40-digit binomial sum and quadrature agree on 7.1432486835642929e-05.
  const double expected = 7.1432486835642929e-05;
  EXPECT_NEAR(RdpOfStep(0.012788, 2.5, 5), expected, 1e-9 * expected);
  const long double quad = testing::RdpByQuadrature(0.012788L, 2.5L, 5);
  EXPECT_NEAR(static_cast<double>(quad), expected, 1e-9 * expected);
}

TEST(RdpOfStepTest, RejectsInvalidInputs) {
  EXPECT_THROW(RdpOfStep(-0.1, 1.0, 2), DomainError);
  EXPECT_THROW(RdpOfStep(1.5, 1.0, 2), DomainError);
  EXPECT_THROW(RdpOfStep(std::nan(""), 1.0, 2), DomainError);
  EXPECT_THROW(RdpOfStep(0.1, 0.0, 2), DomainError);
  EXPECT_THROW(RdpOfStep(0.1, -1.0, 2), DomainError);
  EXPECT_THROW(RdpOfStep(0.1, 1.0, 1), DomainError);
  try {
    RdpOfStep(0.1, 1.0, 1);
  } catch (const DomainError& e) {
    EXPECT_EQ(e.field(), "alpha");
  }
}

TEST(RdpOfStepTest, ExponentGuard) {
  EXPECT_THROW(RdpOfStep(0.1, 1e-160, 2048), DomainError);
  // Huge but representable exponents are handled in log space.
  const double g = RdpOfStep(0.1, 0.05, 2048);
  EXPECT_TRUE(std::isfinite(g));
  EXPECT_GT(g, 0.0);
}

TEST(RdpOfStepTest, GaussianLimit) {
  for (double sigma = 0.5; sigma <= 10.0; sigma += 0.25) {
    for (int alpha = 2; alpha <= 128; ++alpha) {
      EXPECT_NEAR(RdpOfStep(1.0, sigma, alpha), alpha / (2 * sigma * sigma),
                  1e-12);
    }
  }
}

TEST(RdpOfStepTest, AgreesWithQuadratureOnRandomTriples) {
  std::mt19937_64 gen(20260117);
  std::uniform_real_distribution<double> log_q(std::log(1e-4), std::log(0.2));
  std::uniform_real_distribution<double> sigma_dist(0.5, 6.0);
  std::uniform_int_distribution<int> alpha_dist(2, 64);
  for (int i = 0; i < 50; ++i) {
    const double q = std::exp(log_q(gen));
    const double sigma = sigma_dist(gen);
    const int alpha = alpha_dist(gen);
    const double got = RdpOfStep(q, sigma, alpha);
    const double want =
        static_cast<double>(testing::RdpByQuadrature(q, sigma, alpha));
    EXPECT_NEAR(got, want, 1e-8 * want)
        << "q=" << q << " sigma=" << sigma << " alpha=" << alpha;
  }
}

TEST(RdpOfStepTest, MonotoneInOrderRateAndNoise) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> q_dist(1e-4, 0.9);
  std::uniform_real_distribution<double> sigma_dist(0.3, 8.0);
  std::uniform_int_distribution<int> alpha_dist(2, 300);
  for (int i = 0; i < 200; ++i) {
    const double q = q_dist(gen);
    const double sigma = sigma_dist(gen);
    const int alpha = alpha_dist(gen);
    const double g = RdpOfStep(q, sigma, alpha);
    const double tol = 1e-12 * g;
    ASSERT_TRUE(std::isfinite(g));
    ASSERT_GE(g, 0.0);
    EXPECT_GE(RdpOfStep(q, sigma, alpha + 1), g - tol);
    EXPECT_GE(RdpOfStep(std::min(1.0, q * 1.1), sigma, alpha), g - tol);
    EXPECT_LE(RdpOfStep(q, sigma * 1.1, alpha), g + tol);
  }
}

TEST(EpsilonRdpTest, FullBatchSingleStepClosedForm) {
  // alpha/2 + 8/(alpha-1) is minimized at alpha = 5 with value 4.5.
  const RdpAccount a = EpsilonRdp(1.0, 1.0, 1, std::exp(-8.0),
                                  AlphaGrid::Range(2, 64));
  EXPECT_EQ(a.best_order, 5);
  EXPECT_NEAR(a.epsilon, 4.5, 1e-12);
  EXPECT_FALSE(a.grid_truncated);
}

TEST(EpsilonRdpTest, ImageNetReferenceUpperBoundsTighterAccountant) {
  const RdpAccount a = EpsilonRdp(kImageNet);
  EXPECT_GE(a.epsilon, 7.97);
  EXPECT_LE(a.epsilon, 8.8);
  // 40-digit reference evaluation on the same grid: 8.6530775185228884 at 5.
  EXPECT_NEAR(a.epsilon, 8.6530775185228884, 1e-9);
  EXPECT_EQ(a.best_order, 5);
}

TEST(EpsilonRdpTest, HalfImageNetMatchesReferenceAccountant) {
  const PrivacyParams p{640'583, 16'384, 72'000, 2.5, 1.6e-6};
  const RdpAccount a = EpsilonRdp(p);
  EXPECT_NEAR(a.epsilon, 18.986756462535243, 1e-8);
  EXPECT_EQ(a.best_order, 3);
}

TEST(EpsilonRdpTest, CompositionIsLinearInSteps) {
  const RdpAccount a = EpsilonRdp(kImageNet, AlphaGrid::Range(2, 40));
  const double q = kImageNet.sampling_rate();
  for (const OrderRdp& o : a.per_order) {
    EXPECT_EQ(o.rdp, 72'000.0 * RdpOfStep(q, 2.5, o.order));
  }
}

TEST(EpsilonRdpTest, EpsilonIsMinimumOverGrid) {
  const RdpAccount a = EpsilonRdp(kImageNet);
  double best = 1e300;
  int best_order = 0;
  for (const OrderRdp& o : a.per_order) {
    const double e = o.rdp + std::log(1 / kImageNet.delta) / (o.order - 1);
    if (e < best) {
      best = e;
      best_order = o.order;
    }
  }
  EXPECT_EQ(a.epsilon, best);
  EXPECT_EQ(a.best_order, best_order);
  for (std::size_t i = 1; i < a.per_order.size(); ++i) {
    EXPECT_GE(a.per_order[i].rdp, a.per_order[i - 1].rdp * (1 - 1e-12));
  }
}

TEST(EpsilonRdpTest, FlagsGridTruncation) {
  // Tiny eta pushes the optimum far beyond a short grid.
  const RdpAccount a =
      EpsilonRdp(1e-4, 10.0, 10, 1e-5, AlphaGrid::Range(2, 16));
  EXPECT_TRUE(a.grid_truncated);
  EXPECT_EQ(a.best_order, 16);
  EXPECT_FALSE(EpsilonRdp(kImageNet).grid_truncated);
}

TEST(EpsilonRdpTest, MonotoneInParameters) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> q_dist(1e-3, 0.3);
  std::uniform_real_distribution<double> sigma_dist(0.6, 5.0);
  std::uniform_int_distribution<int> steps_dist(1, 5000);
  std::uniform_real_distribution<double> log_delta(std::log(1e-9),
                                                   std::log(1e-2));
  const AlphaGrid grid = AlphaGrid::Range(2, 128);
  for (int i = 0; i < 25; ++i) {
    const double q = q_dist(gen);
    const double sigma = sigma_dist(gen);
    const int steps = steps_dist(gen);
    const double delta = std::exp(log_delta(gen));
    const double eps = EpsilonRdp(q, sigma, steps, delta, grid).epsilon;
    const double tol = 1e-12 * eps;
    EXPECT_LE(EpsilonRdp(q, sigma * 1.2, steps, delta, grid).epsilon,
              eps + tol);
    EXPECT_LE(EpsilonRdp(q, sigma, steps, delta * 2, grid).epsilon, eps + tol);
    EXPECT_GE(EpsilonRdp(q, sigma, steps + 10, delta, grid).epsilon,
              eps - tol);
    EXPECT_GE(EpsilonRdp(q * 1.2, sigma, steps, delta, grid).epsilon,
              eps - tol);
  }
}

TEST(EpsilonRdpTest, RejectsInvalidParams) {
  PrivacyParams p = kImageNet;
  p.delta = 1.5;
  EXPECT_THROW(EpsilonRdp(p), DomainError);
  p = kImageNet;
  p.batch_size = p.dataset_size + 1;
  EXPECT_THROW(EpsilonRdp(p), DomainError);
  EXPECT_THROW(AlphaGrid({}), DomainError);
  EXPECT_THROW(AlphaGrid({3, 2}), DomainError);
  EXPECT_THROW(AlphaGrid({1, 2}), DomainError);
}

TEST(AlphaGridTest, DefaultGrid) {
  const AlphaGrid g = AlphaGrid::Default();
  EXPECT_EQ(g.orders().front(), 2);
  EXPECT_EQ(g.orders()[510], 512);
  EXPECT_EQ(g.largest(), 2048);
  EXPECT_EQ(g.orders().size(), 515u);
}

TEST(RatioDiagnosticTest, ExactForFullBatch) {
  EXPECT_EQ(RatioDiagnostic(1.0, 3.0, 4), 1.0);
}

TEST(RatioDiagnosticTest, BlowsUpAtSmallSigma) {
  // 40-digit binomial sum: 6710.5927243431149.
  const double r = RatioDiagnostic(0.01, 0.5, 8);
  EXPECT_NEAR(r, 6710.5927243431149, 1e-8 * 6710.59);
  const double q = 3.9e-3 * std::sqrt(2.0) * 2.5;
  EXPECT_NEAR(RatioDiagnostic(q, 2.5, 32), 1.1750353617721404, 1e-9);
}

TEST(RatioDiagnosticTest, LowOrderLimitIsSigmaSquaredExpm1) {
  // For q -> 0 the ratio at any order tends to sigma^2 (exp(1/sigma^2) - 1).
  for (double sigma : {2.0, 3.0, 6.0}) {
    const double limit = sigma * sigma * std::expm1(1 / (sigma * sigma));
    EXPECT_NEAR(RatioDiagnostic(1e-7, sigma, 2), limit, 1e-6);
    EXPECT_NEAR(RatioDiagnostic(1e-7, sigma, 8), limit, 1e-5);
  }
}

TEST(RatioDiagnosticTest, RejectsZeroRate) {
  EXPECT_THROW(RatioDiagnostic(0.0, 1.0, 2), DomainError);
}

TEST(ValidityCheckTest, Examples) {
  EXPECT_TRUE(ValidityCheck(0.001, 2.5, 5));
  EXPECT_FALSE(ValidityCheck(0.5, 0.5, 10));
  // 0.0128 * 64 * exp(64 / 12.5) = 137.08.
  EXPECT_FALSE(ValidityCheck(0.0128, 2.5, 64));
  EXPECT_TRUE(ValidityCheck(0.0128, 2.5, 5));
  EXPECT_THROW(ValidityCheck(0.1, 1.0, 1), DomainError);
}

}  // namespace
}  // namespace tanscale
