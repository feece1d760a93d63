// Copyright 2026 The infoprocure Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "infoprocure/verification.hpp"

#include <gtest/gtest.h>

#include <random>

#include "infoprocure/simulate.hpp"
#include "oracles.hpp"

namespace infoprocure {
namespace {

const Bounds kBounds(0.1, 0.2, 10.0, 20.0);

// Fraction of truthful N(0, 1) deliveries of size n passing LCB(0.05).
double LcbPassRate(std::size_t n, std::uint64_t seed) {
  return 1.0 - empirical_failure_prob(1.0, 1.0, n, LcbRule(0.05), 5000,
                                      RngStream(seed).derive("lcb-pass").derive(n));
}

TEST(SampleVarianceTest, Examples) {
  const std::vector<double> a{1, 2, 3}, b{5, 5, 5, 5}, c{-1, 1};
  EXPECT_NEAR(sample_variance(a), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(sample_variance(b), 0.0);
  EXPECT_EQ(sample_variance(c), 1.0);
  const std::vector<double> one{1.0};
  EXPECT_THROW(sample_variance(one), InsufficientDataError);
}

TEST(NormalQuantileTest, MatchesReference) {
  for (double p : {1e-6, 1e-4, 0.01, 0.05, 0.3, 0.5, 0.7, 0.95, 0.99, 1 - 1e-6}) {
    EXPECT_NEAR(normal_quantile(p), oracle::z_quantile(p), 1e-9) << p;
  }
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
}

TEST(LcbStatisticTest, Examples) {
  const std::vector<double> constant{3.0, 3.0, 3.0}, a{1, 2, 3};
  EXPECT_EQ(lcb_statistic(constant, 0.05), 0.0);
  const double s2 = 2.0 / 3.0, m4 = 2.0 / 3.0;
  const double expected = s2 - oracle::z_quantile(0.95) / std::sqrt(3.0) * std::sqrt(m4 - s2 * s2);
  EXPECT_NEAR(lcb_statistic(a, 0.05), expected, 1e-12);
  EXPECT_NEAR(lcb_statistic(a, 0.05), 0.2190, 5e-5);
  EXPECT_THROW(lcb_statistic(a, 0.0), DomainError);
  EXPECT_THROW(lcb_statistic(a, 1.0), DomainError);
  const std::vector<double> one{1.0};
  EXPECT_THROW(lcb_statistic(one, 0.05), InsufficientDataError);
}

// For alpha > 1/2 the quantile is negative and the bound sits above S^2.
TEST(LcbStatisticTest, NeverExceedsSampleVariance) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> size(2, 300);
  std::uniform_real_distribution<double> alpha(0.001, 0.5), scale(1e-3, 1e3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> x(size(gen));
    const double s = scale(gen);
    for (auto& v : x) v = s * z(gen);
    EXPECT_LE(lcb_statistic(x, alpha(gen)), sample_variance(x));
  }
}

TEST(LcbStatisticTest, PassFractionAtFiveHundred) {
  const double pass = LcbPassRate(500, 1);
  EXPECT_GE(pass, 0.935);
  EXPECT_LE(pass, 0.965);
}

// Truthful LCB(0.05) deliveries pass with frequency in [0.935, 0.975].
TEST(LcbCalibrationTest, PassRateAtFifty) {
  const double pass = LcbPassRate(50, 1);
  EXPECT_GE(pass, 0.935);
  EXPECT_LE(pass, 0.975);
}

TEST(LcbCalibrationTest, PassRateAtOneFiftyEight) {
  const double pass = LcbPassRate(158, 1);
  EXPECT_GE(pass, 0.935);
  EXPECT_LE(pass, 0.975);
}

TEST(LcbCalibrationTest, PassRateAtFiveHundred) {
  const double pass = LcbPassRate(500, 1);
  EXPECT_GE(pass, 0.935);
  EXPECT_LE(pass, 0.975);
}

TEST(SampleVarianceCalibrationTest, PassProbabilityNearOneHalf) {
  const double fail = empirical_failure_prob(10.0, 10.0, 200, SampleVarianceRule{}, 5000,
                                             RngStream(1).derive("sv-pass"));
  EXPECT_GE(1.0 - fail, 0.44);
  EXPECT_LE(1.0 - fail, 0.56);
}

TEST(VerifyTest, Examples) {
  EXPECT_TRUE(verify(ExactOracleRule{}, {}, 10.0, 10.0));
  EXPECT_FALSE(verify(ExactOracleRule{}, {}, 9.99, 10.0));
  const std::vector<double> a{1, 2, 3};
  EXPECT_FALSE(verify(SampleVarianceRule{}, a, 0.5, 1.0));
  EXPECT_TRUE(verify(SampleVarianceRule{}, a, 0.7, 1.0));
  EXPECT_TRUE(verify(LcbRule(0.05), a, 0.5, 1.0));
}

TEST(VerifyTest, ExactOracleIsAPureThreshold) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> v(1, 30);
  std::normal_distribution<double> z;
  for (int i = 0; i < 1000; ++i) {
    const double truth = v(gen), reported = v(gen);
    std::vector<double> junk{z(gen), z(gen), z(gen)};
    EXPECT_EQ(verify(ExactOracleRule{}, junk, reported, truth), truth <= reported);
  }
}

TEST(RuleNameTest, RoundTrips) {
  for (const std::string s : {"sample-variance", "exact-oracle", "lcb(0.05)", "lcb(0.1)"}) {
    EXPECT_EQ(rule_name(parse_rule(s)), s);
  }
  EXPECT_EQ(rule_name(parse_rule("lcb:0.05")), "lcb(0.05)");
  EXPECT_THROW(parse_rule("lcb(1.5)"), DomainError);
  EXPECT_THROW(parse_rule("lcb(x)"), DomainError);
  EXPECT_THROW(parse_rule("median"), DomainError);
}

// Closed-form inversions of the Gaussian envelope, written out independently.
double LowerClosedForm(double n, double ratio, double c3, double c4, double v_hi) {
  return v_hi * std::sqrt(std::log(c3 / ratio) / (c4 * n));
}
double UpperClosedForm(double n, double level, double c1, double c2, double v_hi) {
  return v_hi * std::sqrt(std::log(c1 * std::sqrt(n) / level) / (c2 * n));
}

TEST(SlackLowerTest, ClosedFormExample) {
  const GaussianTailEnvelope env(20.0);
  const double d = slack_lower(100.0, kBounds, env);
  EXPECT_NEAR(d, LowerClosedForm(100.0, 0.25, 1, 1, 20.0), 1e-6);
  EXPECT_NEAR(d, 2.3548, 5e-5);
}

TEST(SlackLowerTest, DecreasesWhenNDoubles) {
  const GaussianTailEnvelope env(20.0);
  for (double n = 1; n < 1e6; n *= 2) {
    EXPECT_LT(slack_lower(2 * n, kBounds, env), slack_lower(n, kBounds, env));
  }
}

// Equal score bounds put the level at 1. Bounds cannot express that, so the
// envelope is scaled by s_lo / s_hi instead. C3 = e keeps the radius nonzero.
TEST(SlackLowerTest, UnitRatioShrinksWithN) {
  struct UnitLevel {
    GaussianTailEnvelope inner;
    double phi(double n, double u) const { return inner.phi(n, u); }
    double zeta(double n, double u) const { return 0.25 * inner.zeta(n, u); }
    double v_hi() const { return inner.v_hi(); }
  };
  const UnitLevel env{GaussianTailEnvelope(20.0, 1, 1, std::exp(1.0), 1)};
  const double at_1e2 = slack_lower(1e2, kBounds, env);
  const double at_1e4 = slack_lower(1e4, kBounds, env);
  EXPECT_LT(at_1e4, at_1e2);
  EXPECT_NEAR(at_1e2, LowerClosedForm(1e2, 1.0, std::exp(1.0), 1, 20.0), 1e-6);
  EXPECT_NEAR(at_1e4, LowerClosedForm(1e4, 1.0, std::exp(1.0), 1, 20.0), 1e-6);
}

TEST(SlackUpperTest, ClosedFormExample) {
  const GaussianTailEnvelope env(20.0);
  const double d = slack_upper(100.0, kBounds, env);
  EXPECT_NEAR(d, UpperClosedForm(100.0, 0.025, 1, 1, 20.0), 1e-6);
  EXPECT_NEAR(d, 20.0 * std::sqrt(std::log(400.0) / 100.0), 1e-6);
}

TEST(SlackUpperTest, EventuallyDecreasingAndLogRootScale) {
  const GaussianTailEnvelope env(20.0);
  for (double n = 10; n < 1e6; n *= 2) {
    EXPECT_LT(slack_upper(2 * n, kBounds, env), slack_upper(n, kBounds, env));
  }
  for (double n : {1e2, 1e3, 1e4}) {
    const double ratio = slack_upper(n, kBounds, env) / std::sqrt(std::log(n) / n);
    EXPECT_GE(ratio, 0.5 * 20.0);
    EXPECT_LE(ratio, 2.0 * 20.0);
  }
}

TEST(SlackTest, AgreesWithClosedFormsOverConstants) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> c(0.5, 3.0), n(1.0, 1e6);
  for (int i = 0; i < 300; ++i) {
    const double c1 = c(gen), c2 = c(gen), c3 = c(gen) * 2, c4 = c(gen), nn = n(gen);
    const GaussianTailEnvelope env(20.0, c1, c2, c3, c4);
    EXPECT_NEAR(slack_lower(nn, kBounds, env),
                std::max(1e-9, LowerClosedForm(nn, 0.25, c3, c4, 20.0)), 1e-6);
    EXPECT_NEAR(slack_upper(nn, kBounds, env),
                std::max(1e-9, UpperClosedForm(nn, 0.025, c1, c2, 20.0)), 1e-6);
  }
}

TEST(SlackTest, VanishesAsNGrows) {
  const GaussianTailEnvelope env(20.0);
  EXPECT_LT(slack_lower(1e6, kBounds, env), 0.05 * slack_lower(1e2, kBounds, env));
}

TEST(SlackTest, UnboundedAndInvalidN) {
  // C3 so large that zeta stays above the level on the whole search domain.
  const GaussianTailEnvelope env(20.0, 1, 1, 1e300, 1e-6);
  EXPECT_THROW(slack_lower(1.0, kBounds, env), UnboundedSlackError);
  EXPECT_THROW(slack_lower(0.5, kBounds, GaussianTailEnvelope(20.0)), DomainError);
  EXPECT_THROW(slack_upper(0.0, kBounds, GaussianTailEnvelope(20.0)), DomainError);
}

TEST(TailEnvelopeTest, MonotoneInNAndU) {
  const GaussianTailEnvelope env(20.0, 1.3, 0.7, 2.0, 0.9);
  for (double n : {10.0, 100.0, 1000.0}) {
    for (double u : {1.0, 2.0, 5.0}) {
      EXPECT_LE(env.zeta(2 * n, u), env.zeta(n, u));
      EXPECT_LE(env.zeta(n, 2 * u), env.zeta(n, u));
      EXPECT_LE(env.phi(n, 2 * u), env.phi(n, u));
    }
  }
}

}  // namespace
}  // namespace infoprocure
