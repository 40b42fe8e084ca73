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

#include "tanscale/tan.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "tanscale/accountant.h"

namespace tanscale {
namespace {

constexpr PrivacyParams kImageNet{1'281'167, 16'384, 72'000, 2.5, 8e-7};
constexpr PrivacyParams kCifar{50'000, 4'096, 2'500, 3.0, 2e-5};

TEST(EtaTest, DefinitionCollapsesToOne) {
  const double sigma = 0.5;
  EXPECT_NEAR(Eta(sigma * std::sqrt(2.0), sigma, 1), 1.0, 1e-15);
}

TEST(EtaTest, ReferenceConfigurations) {
  // Closed form evaluated at 40 digits.
  EXPECT_NEAR(Eta(kImageNet), 0.97056681324196568, 1e-14);
  EXPECT_NEAR(Eta(kCifar), 0.96543645858003289, 1e-14);
}

TEST(EpsTanTest, Examples) {
  EXPECT_EQ(EpsTan(0.0, 1e-5), 0.0);
  // The small-eta privacy-wall setting; roughly eps_TAN = 1.
  EXPECT_NEAR(EpsTan(0.13, 1e-6), 0.983, 5e-4);
  EXPECT_NEAR(EpsTan(0.9706, 8e-7), 8.22, 0.01);
  EXPECT_NEAR(EpsTan(0.9706, 8e-7), 8.26, 0.1);
  EXPECT_THROW(EpsTan(1.0, 0.0), DomainError);
  EXPECT_THROW(EpsTan(1.0, 1.0), DomainError);
  EXPECT_THROW(EpsTan(-1.0, 0.5), DomainError);
}

TEST(EpsTanTest, StrictlyIncreasingInEta) {
  double prev = EpsTan(0.0, 1e-6);
  for (double eta = 0.01; eta < 10; eta += 0.01) {
    const double cur = EpsTan(eta, 1e-6);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
}

TEST(GdpMuTest, Examples) {
  EXPECT_NEAR(GdpMu(1.0, 1.0, 1), std::sqrt(std::exp(1.0) - 1.0), 1e-15);
  EXPECT_NEAR(GdpMu(1.0, 1.0, 1), 1.3108, 1e-4);
  const double mu = GdpMu(kImageNet);
  EXPECT_NEAR(mu, 1.4293671234340833, 1e-12);
  EXPECT_NEAR(mu / (std::sqrt(2.0) * Eta(kImageNet)), 1.0, 0.05);
  EXPECT_NEAR(GdpMu(0.01, 100.0, 100) / (std::sqrt(2.0) * Eta(0.01, 100.0, 100)),
              1.0, 1e-4);
}

TEST(GdpMuTest, ConvergesMonotonicallyToTanLimit) {
  double prev = 1e300;
  for (double sigma = 0.5; sigma < 200; sigma *= 1.3) {
    const double ratio =
        GdpMu(0.01, sigma, 1000) / (std::sqrt(2.0) * Eta(0.01, sigma, 1000));
    EXPECT_GE(ratio, 1.0);
    EXPECT_LT(ratio, prev);
    prev = ratio;
  }
  EXPECT_NEAR(prev, 1.0, 1e-4);
}

TEST(TcdpOmegaTest, Examples) {
  EXPECT_NEAR(TcdpOmega(1.0, std::exp(-9.0)), 4.0, 1e-14);
  EXPECT_NEAR(TcdpOmega(3.0, std::exp(-9.0)), 2.0, 1e-14);
  EXPECT_NEAR(TcdpOmega(0.9706, 8e-7), 4.860, 1e-3);
  EXPECT_THROW(TcdpOmega(0.0, 1e-5), DomainError);
}

TEST(SummarizeTest, ImageNetReference) {
  const TanSummary s = Summarize(kImageNet);
  EXPECT_NEAR(s.eta, 0.9706, 1e-4);
  EXPECT_NEAR(s.eps_tan, 8.2150766783155486, 1e-12);
  EXPECT_NEAR(s.tcdp_omega, 4.8604443792890002, 1e-12);
  EXPECT_NEAR(s.eta * s.eta, 72'000 * s.eta_step * s.eta_step, 1e-12);
  EXPECT_NEAR(s.total_noise * s.eta, 1.0, 1e-15);
  EXPECT_EQ(s.gdp_mu_large_sigma, std::sqrt(2.0) * s.eta);
}

TEST(SummarizeTest, CifarReference) {
  const TanSummary s = Summarize(kCifar);
  EXPECT_NEAR(s.eps_tan, 7.2833711374049935, 1e-12);
  EXPECT_NEAR(s.eps_tan, 7.28, 0.01);
}

TEST(SummarizeTest, IdentitiesOnRandomParams) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<std::int64_t> n_dist(2, 2'000'000);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    PrivacyParams p;
    p.dataset_size = n_dist(gen);
    p.batch_size = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(unit(gen) * p.dataset_size));
    p.steps = 1 + static_cast<std::int64_t>(unit(gen) * 1e5);
    p.noise_multiplier = 0.3 + 10 * unit(gen);
    p.delta = std::pow(10.0, -1 - 8 * unit(gen));
    const TanSummary s = Summarize(p);
    EXPECT_NEAR(s.eta * s.eta, p.steps * s.eta_step * s.eta_step,
                1e-12 * s.eta * s.eta);
    EXPECT_NEAR(s.total_noise * s.eta, 1.0, 1e-15);
    EXPECT_GE(s.eps_tan, 0.0);
    EXPECT_GT(s.tcdp_omega, 1.0);
  }
}

TEST(TanInvarianceTest, QuarterStepsIdentity) {
  // Doubling q and dividing S by 4 leaves eta, hence eps_TAN, unchanged.
  const PrivacyParams p{1'000'000, 1'000, 40'000, 2.0, 1e-6};
  PrivacyParams doubled = p;
  doubled.batch_size *= 2;
  doubled.steps /= 4;
  EXPECT_EQ(Eta(p), Eta(doubled));
  EXPECT_EQ(EpsTan(Eta(p), p.delta), EpsTan(Eta(doubled), doubled.delta));
}

TEST(TanInvarianceTest, ConstantTanReparameterizationIsBitIdentical) {
  // Any (q', sigma', S') with the same eta gives the same eps_TAN.
  const double eta = Eta(kImageNet);
  const double eps = EpsTan(eta, kImageNet.delta);
  for (double scale : {0.25, 0.5, 2.0, 4.0}) {
    const double q = kImageNet.sampling_rate() * scale;
    const double sigma = 2.5 * scale;
    EXPECT_EQ(EpsTan(Eta(q, sigma, 72'000), kImageNet.delta), eps);
  }
}

TEST(TanInvarianceTest, PrivacyWallBracketInLargeNoiseRegime) {
  // eps_RDP stays within [0.9, 1.15] x eps_TAN once sigma >= 2.
  for (const PrivacyParams& p :
       {kImageNet, kCifar, PrivacyParams{1'000'000, 4'000, 10'000, 2.0, 1e-6},
        PrivacyParams{60'000, 256, 5'000, 4.0, 1e-5}}) {
    const RdpAccount a = EpsilonRdp(p);
    const double q = p.sampling_rate();
    if (p.noise_multiplier < 2 ||
        !ValidityCheck(q, p.noise_multiplier, a.best_order)) {
      continue;
    }
    const double eps_tan = EpsTan(Eta(p), p.delta);
    EXPECT_GE(a.epsilon, 0.9 * eps_tan);
    EXPECT_LE(a.epsilon, 1.15 * eps_tan);
  }
}

}  // namespace
}  // namespace tanscale
