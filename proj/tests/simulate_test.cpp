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

#include "infoprocure/simulate.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace infoprocure {
namespace {

const Bounds kBounds(0.1, 0.2, 10.0, 20.0);
const Prior kPrior({0.1, 0.2}, {10.0, 20.0});

FocalEnvironment Env(AgentType focal, double beta, VerificationRule rule) {
  return {focal, kPrior, 10, MechanismParams::for_bounds(beta, kBounds), rule};
}

double TruthfulExactOracle(double beta, double cost, double v) {
  return oracle::truthful_exact_interim_utility(beta, cost, v, 9, 0.1, 0.2, 10.0, 20.0);
}

TEST(UtilityEstimateTest, MeanAndStandardError) {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto e = UtilityEstimate::from_samples(xs);
  EXPECT_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(e.reps, 4u);
  EXPECT_THROW(UtilityEstimate::from_samples({}), DomainError);
}

TEST(RunWithVerificationTest, ExactOracleTruthfulPasses) {
  const std::vector<AgentType> types{{0.10, 10.0}, {0.15, 10.0}};
  const std::vector<Action> a{Action::participate(Report::truthful(types[0])),
                              Action::participate(Report::truthful(types[1]))};
  const auto params = MechanismParams::for_bounds(100.0, kBounds);
  const auto r = run_with_verification(a, types, params, ExactOracleRule{}, RngStream(1));
  EXPECT_FALSE(r.outcome.voided);
  EXPECT_NEAR(r.utilities[0], 0.05 * 100.0 / std::sqrt(1.5), 1e-12);
  EXPECT_NEAR(r.utilities[0], 4.0825, 5e-5);
  EXPECT_EQ(r.utilities[1], 0.0);
}

TEST(RunWithVerificationTest, ExactOracleUnderReportIsVoided) {
  const std::vector<AgentType> types{{0.10, 10.0}, {0.15, 10.0}};
  const std::vector<Action> a{Action::participate(Report(0.10, 9.0)),
                              Action::participate(Report::truthful(types[1]))};
  const auto params = MechanismParams::for_bounds(100.0, kBounds);
  const auto r = run_with_verification(a, types, params, ExactOracleRule{}, RngStream(1));
  EXPECT_TRUE(r.outcome.voided);
  EXPECT_NEAR(r.utilities[0], -0.10 * r.outcome.quantity, 1e-12);
  EXPECT_LT(r.utilities[0], 0.0);
}

TEST(RunWithVerificationTest, LargeOverReportPassesSampleVariance) {
  const std::vector<AgentType> types{{0.10, 10.0}, {0.15, 15.0}};
  const std::vector<Action> a{Action::participate(Report(0.01, 100.0)),
                              Action::participate(Report::truthful(types[1]))};
  const auto params = MechanismParams::for_bounds(100.0, kBounds);
  const RngStream root(77);
  int passed = 0;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    const auto out =
        run_with_verification(a, types, params, SampleVarianceRule{}, root.derive(r));
    ASSERT_EQ(out.outcome.winner, std::size_t{0});
    passed += out.outcome.voided ? 0 : 1;
  }
  EXPECT_GE(passed / 2000.0, 0.999);
}

TEST(RunWithVerificationTest, MismatchedTypesThrow) {
  const std::vector<AgentType> types{{0.10, 10.0}};
  const std::vector<Action> a{Action::opt_out(), Action::opt_out()};
  const auto params = MechanismParams::for_bounds(100.0, kBounds);
  EXPECT_THROW(run_with_verification(a, types, params, ExactOracleRule{}, RngStream(1)),
               DomainError);
}

TEST(InterimUtilityTest, NeverWinningReportHasZeroUtility) {
  // Score 0.3 * 20 = 6 exceeds every rival score.
  const auto env = Env(AgentType(0.3, 20.0), 1000.0, LcbRule(0.05));
  const auto e = interim_utility(env, 20.0, 500, RngStream(1));
  EXPECT_EQ(e.mean, 0.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(InterimUtilityTest, ExactOracleMatchesQuadrature) {
  const auto env = Env(AgentType(0.12, 10.0), 1000.0, ExactOracleRule{});
  const auto e = interim_utility(env, 10.0, 5000, RngStream(2).derive("interim"));
  const double expected = TruthfulExactOracle(1000.0, 0.12, 10.0);
  EXPECT_GT(e.mean, 0.0);
  EXPECT_NEAR(e.mean, expected, 3.0 * e.std_error);
}

TEST(InterimUtilityTest, SampleVarianceCutsTruthfulUtility) {
  const RngStream rng = RngStream(3).derive("paired");
  const auto exact = interim_utility(Env(AgentType(0.12, 10.0), 1000.0, ExactOracleRule{}), 10.0,
                                     5000, rng);
  const auto sv = interim_utility(Env(AgentType(0.12, 10.0), 1000.0, SampleVarianceRule{}), 10.0,
                                  5000, rng);
  EXPECT_LT(sv.mean, exact.mean);
}

TEST(InterimUtilityTest, IdenticalAcrossThreadCounts) {
  const auto env = Env(AgentType(0.13, 12.0), 100.0, LcbRule(0.05));
  const auto a = interim_utility(env, 12.5, 3000, RngStream(4), 1);
  const auto b = interim_utility(env, 12.5, 3000, RngStream(4), 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(InterimUtilityTest, RejectsBadEnvironment) {
  auto env = Env(AgentType(0.13, 12.0), 100.0, LcbRule(0.05));
  EXPECT_THROW(interim_utility(env, 12.0, 0, RngStream(1)), DomainError);
  env.sellers = 1;
  EXPECT_THROW(interim_utility(env, 12.0, 10, RngStream(1)), DomainError);
}

TEST(BestResponseTest, ExactOracleArgmaxIsFirstGridPointAtOrAboveTruth) {
  const auto grid = linear_grid(10.0, 16.0, 0.25);
  for (double beta : {10.0, 1000.0}) {
    for (double truth : {12.0, 12.1}) {
      const auto env = Env(AgentType(0.12, truth), beta, ExactOracleRule{});
      const auto curve = best_response_curve(env, grid, 2000, RngStream(5));
      EXPECT_EQ(curve.argmax_report, truth == 12.0 ? 12.0 : 12.25) << beta;
    }
  }
}

TEST(BestResponseTest, CommonRandomNumbersAreBitIdentical) {
  const auto grid = linear_grid(10.0, 16.0, 0.5);
  const auto env = Env(AgentType(0.12, 11.0), 100.0, LcbRule(0.05));
  const auto a = best_response_curve(env, grid, 1000, RngStream(6), 1);
  const auto b = best_response_curve(env, grid, 1000, RngStream(6), 3);
  ASSERT_EQ(a.utilities.size(), b.utilities.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    EXPECT_EQ(a.utilities[g].mean, b.utilities[g].mean);
    EXPECT_EQ(a.utilities[g].std_error, b.utilities[g].std_error);
  }
  EXPECT_EQ(a.argmax_report, b.argmax_report);
  // The single-point interim estimate reuses replication streams.
  EXPECT_EQ(interim_utility(env, grid[3], 1000, RngStream(6)).mean, a.utilities[3].mean);
}

TEST(BestResponseTest, TiesGoToSmallestReport) {
  // A seller that never wins has zero utility everywhere.
  const auto env = Env(AgentType(0.3, 20.0), 100.0, SampleVarianceRule{});
  const auto grid = linear_grid(14.0, 20.0, 1.0);
  EXPECT_EQ(best_response_curve(env, grid, 100, RngStream(1)).argmax_report, 14.0);
}

TEST(BestResponseTest, RejectsBadGrids) {
  const auto env = Env(AgentType(0.12, 11.0), 100.0, LcbRule(0.05));
  const std::vector<double> empty, unsorted{12, 11};
  EXPECT_THROW(best_response_curve(env, empty, 10, RngStream(1)), DomainError);
  EXPECT_THROW(best_response_curve(env, unsorted, 10, RngStream(1)), DomainError);
}

TEST(GridTest, LinearAndAroundTruth) {
  const auto g = linear_grid(10.0, 16.0, 0.25);
  EXPECT_EQ(g.size(), 25u);
  EXPECT_EQ(g.front(), 10.0);
  EXPECT_EQ(g.back(), 16.0);
  const auto around = report_grid_around(12.1, {10.0, 10.0, 0.25}, kBounds);
  EXPECT_NEAR(around.front(), 10.1, 1e-12);
  EXPECT_NEAR(around.back(), 19.85, 1e-12);
  EXPECT_TRUE(std::find(around.begin(), around.end(), 12.1) != around.end());
}

TEST(ParticipationMapTest, ExactOracleLowCostTypeMatchesQuadrature) {
  const std::vector<AgentType> types{{0.11, 10.0}};
  const auto env = Env(types[0], 1000.0, ExactOracleRule{});
  const auto cells =
      participation_map(types, {10.0, 10.0, 0.25}, kBounds, env, 5000, RngStream(8));
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_TRUE(cells[0].participates);
  EXPECT_EQ(cells[0].optimal_report, 10.0);
  EXPECT_NEAR(cells[0].optimal_report_utility.mean, TruthfulExactOracle(1000.0, 0.11, 10.0),
              3.0 * cells[0].optimal_report_utility.std_error);
}

TEST(ParticipationMapTest, RejectsTypesOutsideBounds) {
  const std::vector<AgentType> types{{0.25, 10.0}};
  const auto env = Env(AgentType(0.11, 10.0), 1000.0, ExactOracleRule{});
  EXPECT_THROW(participation_map(types, {1, 1, 0.25}, kBounds, env, 10, RngStream(1)),
               DomainError);
}

TEST(FailureProbTest, Examples) {
  const RngStream rng = RngStream(1).derive("failure-test");
  const double sv = empirical_failure_prob(10.0, 10.0, 200, SampleVarianceRule{}, 5000, rng);
  EXPECT_GE(sv, 0.44);
  EXPECT_LE(sv, 0.56);
  const double lcb = empirical_failure_prob(10.0, 10.0, 158, LcbRule(0.05), 5000, rng);
  EXPECT_GE(lcb, 0.025);
  EXPECT_LE(lcb, 0.075);
  for (const VerificationRule& rule :
       {VerificationRule{SampleVarianceRule{}}, VerificationRule{LcbRule(0.05)},
        VerificationRule{ExactOracleRule{}}}) {
    EXPECT_LE(empirical_failure_prob(10.0, 1e7, 100, rule, 5000, rng), 0.001);
  }
  EXPECT_THROW(empirical_failure_prob(1, 1, 1, SampleVarianceRule{}, 10, rng), DomainError);
}

// The analytic winning utility q sqrt(beta s) - sqrt(beta) c V~ / sqrt(s)
// agrees in sign with the Monte Carlo mean when both are resolved.
TEST(AnalyticUtilityTest, SignMatchesConditionalMonteCarlo) {
  const double beta = 1000.0, cost = 0.12, truth = 12.0;
  const auto params = MechanismParams::for_bounds(beta, kBounds);
  const std::vector<AgentType> types{{cost, truth}, {0.2, 9.0}};
  int resolved = 0;
  for (const VerificationRule& rule :
       {VerificationRule{SampleVarianceRule{}}, VerificationRule{LcbRule(0.05)}}) {
    for (double reported : {10.5, 11.5, 12.0, 12.5, 14.0}) {
      for (double rival : {1.8, 2.1, 2.4}) {
        const std::vector<Action> a{Action::participate(Report(cost, reported)),
                                    Action::participate(Report(rival / 9.0, 9.0))};
        const auto base = run_second_score(a, params);
        ASSERT_EQ(base.winner, std::size_t{0});
        const RngStream rng = RngStream(10).derive(rule_name(rule)).derive(
            static_cast<std::uint64_t>(reported * 100 + rival * 10));
        std::vector<double> u(4000);
        for (std::size_t r = 0; r < u.size(); ++r) {
          u[r] = run_with_verification(a, types, params, rule, rng.derive(r)).utilities[0];
        }
        const auto mc = UtilityEstimate::from_samples(u);
        const double q = 1.0 - empirical_failure_prob(truth, reported,
                                                      sample_count(base.quantity), rule, 4000,
                                                      rng.derive("q"));
        const double analytic = analytic_winning_utility(q, beta, rival, cost, reported);
        // q is itself estimated, so the analytic value carries sqrt(beta s) se(q).
        const double analytic_se = std::sqrt(beta * rival) * std::sqrt(q * (1 - q) / 4000.0);
        if (std::abs(mc.mean) > 3.0 * mc.std_error && std::abs(analytic) > 3.0 * analytic_se) {
          ++resolved;
          EXPECT_EQ(analytic > 0, mc.mean > 0) << rule_name(rule) << " " << reported << " " << rival;
        }
      }
    }
  }
  EXPECT_GT(resolved, 10);
}

TEST(KappaTest, ZeroScoreGivesZero) {
  const auto k = kappa(0.0, UniformScores{0, 1}, 10, 100, RngStream(1));
  EXPECT_EQ(k.value, 0.0);
}

TEST(KappaTest, TwoSellersMatchClosedForm) {
  EXPECT_NEAR(oracle::kappa_uniform_two(0.5), 0.6796, 5e-5);
  for (double s : {0.1, 0.3, 0.5, 0.7}) {
    EXPECT_NEAR(oracle::kappa_uniform_quadrature(s, 2), oracle::kappa_uniform_two(s), 1e-10);
    const auto k = kappa(s, UniformScores{0, 1}, 2, 20000, RngStream(11).derive(s * 10));
    EXPECT_NEAR(k.value, oracle::kappa_uniform_two(s), 3.0 * k.std_error) << s;
  }
}

TEST(KappaTest, ManySellersMatchQuadrature) {
  for (int m : {10, 100}) {
    const auto k = kappa(0.2, UniformScores{0, 1}, m, 20000, RngStream(12).derive(m));
    EXPECT_NEAR(k.value, oracle::kappa_uniform_quadrature(0.2, m), 3.0 * k.std_error) << m;
  }
}

TEST(KappaTest, PriorScoresMatchQuadrature) {
  const double s = 1.5;
  const int m = 3;
  const auto surv = [](double x) {
    return oracle::product_score_survival(x, 0.1, 0.2, 10.0, 20.0);
  };
  const auto g = [&](double x) { return std::pow(surv(x) / surv(s), m - 1); };
  const double inv_root =
      1.0 / std::sqrt(s) +
      oracle::integrate([&](double x) { return -0.5 * std::pow(x, -1.5) * g(x); }, s, 4.0);
  const double root =
      std::sqrt(s) + oracle::integrate([&](double x) { return 0.5 / std::sqrt(x) * g(x); }, s, 4.0);
  const auto k = kappa(s, PriorScores(kPrior), m, 20000, RngStream(13));
  EXPECT_NEAR(k.value, s * inv_root / root, 3.0 * k.std_error);
}

TEST(KappaTest, IncreasingInScore) {
  const auto grid = linear_grid(0.05, 0.8, 0.05);
  for (std::size_t m : {10u, 100u}) {
    std::vector<double> y, w, se;
    for (double s : grid) {
      const auto k = kappa(s, UniformScores{0, 1}, m, 5000, RngStream(14).derive(m));
      y.push_back(k.value);
      se.push_back(k.std_error);
      w.push_back(1.0 / (k.std_error * k.std_error));
    }
    const auto fit = oracle::isotonic_increasing(y, w);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_LT(std::abs(y[i] - fit[i]), 2.0 * se[i]);
    EXPECT_LT(y.front(), y.back());
  }
}

TEST(KappaTest, DegenerateConditioning) {
  EXPECT_THROW(kappa(1.0, UniformScores{0, 1}, 2, 10, RngStream(1)), DegenerateConditioningError);
  EXPECT_THROW(kappa(4.0, PriorScores(kPrior), 2, 10, RngStream(1)), DegenerateConditioningError);
  EXPECT_THROW(kappa(0.5, UniformScores{0, 1}, 1, 10, RngStream(1)), DomainError);
}

TEST(OptInConditionTest, Examples) {
  EXPECT_TRUE(opt_in_condition(0.6796, 0.05, 0.01));
  EXPECT_FALSE(opt_in_condition(0.95, 0.05, 0.01));
  // The boundary itself satisfies the (non-strict) condition.
  EXPECT_TRUE(opt_in_condition(0.94, 0.05, 0.01));
  EXPECT_FALSE(opt_in_condition(std::nextafter(0.94, 1.0), 0.05, 0.01));
  EXPECT_TRUE(opt_in_condition(0.0, 0.5, 0.0));
  EXPECT_THROW(opt_in_condition(0.5, 0.0, 0.0), DomainError);
  EXPECT_THROW(opt_in_condition(0.5, 0.5, -1.0), DomainError);
}

TEST(AnalyticUtilityTest, ClosedFormMatchesAlgebra) {
  // Winner with V~ = 10, c = 0.1 against runner-up score 1.5, sure pass.
  const double u = analytic_winning_utility(1.0, 100.0, 1.5, 0.1, 10.0);
  EXPECT_NEAR(u, 0.05 * 100.0 / std::sqrt(1.5), 1e-12);
}

}  // namespace
}  // namespace infoprocure
