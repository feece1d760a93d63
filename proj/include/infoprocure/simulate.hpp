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

// Monte Carlo evaluation of seller incentives under the verified auction.
//
// Random stream layout, relative to the stream passed in by the caller:
//   rng / <replication> / "rivals" / <agent>   rival types
//   rng / <replication> / "data"               standard normals for delivery
//   rng / <replication>                        kappa and failure-probability draws
// Replications never share state, so every estimator is bit-identical for any
// thread count. The same replication streams are reused across report grid
// points and across types (common random numbers).

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "infoprocure/core.hpp"
#include "infoprocure/mechanism.hpp"
#include "infoprocure/parallel.hpp"
#include "infoprocure/rng.hpp"
#include "infoprocure/verification.hpp"

namespace infoprocure {

class DegenerateConditioningError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo mean with standard error sd / sqrt(reps).
struct UtilityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;

  static UtilityEstimate from_samples(std::span<const double> xs) {
    detail::require(!xs.empty(), "UtilityEstimate needs at least one replication");
    UtilityEstimate e;
    e.reps = xs.size();
    const double n = static_cast<double>(xs.size());
    e.mean = compensated_sum(xs) / n;
    if (xs.size() > 1) {
      std::vector<double> sq(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - e.mean) * (xs[i] - e.mean);
      e.std_error = std::sqrt(compensated_sum(sq) / (n - 1.0) / n);
    }
    return e;
  }
};

/// Standard normals drawn on demand from one stream and cached, so every
/// request for n samples sees the same first n draws.
class GaussianDataSource {
 public:
  explicit GaussianDataSource(const RngStream& stream) : gen_(stream.generator()) {}

  std::span<const double> standard(std::size_t n) {
    while (z_.size() < n) z_.push_back(gen_.normal());
    return {z_.data(), n};
  }

  /// n draws of N(0, variance). The returned view is invalidated by the next call.
  std::span<const double> draw(std::size_t n, double variance) {
    const auto z = standard(n);
    const double sd = std::sqrt(variance);
    buffer_.resize(n);
    for (std::size_t i = 0; i < n; ++i) buffer_[i] = sd * z[i];
    return buffer_;
  }

 private:
  Generator gen_;
  std::vector<double> z_;
  std::vector<double> buffer_;
};

/// Runs the ex post test on the winner's delivery and sets `voided`.
/// Returns whether the delivery passed.
inline bool verify_delivery(AuctionOutcome& outcome, double winner_true_inv_fisher,
                            double winner_reported_inv_fisher,
                            const VerificationRule& rule, GaussianDataSource& data) {
  bool passed;
  if (uses_samples(rule)) {
    const auto samples = data.draw(sample_count(outcome.quantity), winner_true_inv_fisher);
    passed = verify(rule, samples, winner_reported_inv_fisher, winner_true_inv_fisher);
  } else {
    passed = verify(rule, {}, winner_reported_inv_fisher, winner_true_inv_fisher);
  }
  outcome.voided = !passed;
  return passed;
}

struct VerifiedAuction {
  AuctionOutcome outcome;
  /// One entry per action; zero for losers and opt-outs.
  std::vector<double> utilities;
};

/// The verified auction: second-score allocation, then floor(n*) (at least one)
/// Gaussian samples at the winner's true variance, then the ex post test.
inline VerifiedAuction run_with_verification(std::span<const Action> actions,
                                             std::span<const AgentType> true_types,
                                             const MechanismParams& params,
                                             const VerificationRule& rule,
                                             GaussianDataSource& data) {
  detail::require(actions.size() == true_types.size(),
                  "run_with_verification: one true type per action is required");
  VerifiedAuction result{run_second_score(actions, params),
                         std::vector<double>(actions.size(), 0.0)};
  if (!result.outcome.winner) return result;
  const std::size_t w = *result.outcome.winner;
  verify_delivery(result.outcome, true_types[w].inv_fisher,
                  actions[w].report().reported_inv_fisher, rule, data);
  result.utilities[w] = seller_utility(result.outcome, w, true_types[w].cost);
  return result;
}

inline VerifiedAuction run_with_verification(std::span<const Action> actions,
                                             std::span<const AgentType> true_types,
                                             const MechanismParams& params,
                                             const VerificationRule& rule,
                                             const RngStream& rng) {
  GaussianDataSource data(rng.derive("data"));
  return run_with_verification(actions, true_types, params, rule, data);
}

/// Analytic winning utility given the lowest rival score and a pass
/// probability: q sqrt(beta s) - sqrt(beta) c V~ / sqrt(s).
inline double analytic_winning_utility(double pass_probability, double beta,
                                       double rival_min_score, double cost,
                                       double reported_inv_fisher) {
  return pass_probability * std::sqrt(beta * rival_min_score) -
         std::sqrt(beta) * cost * reported_inv_fisher / std::sqrt(rival_min_score);
}

// ---------------------------------------------------------------------------
// Interim utilities and best responses

/// Environment of the incentive experiments: the focal seller is agent 0 and
/// bids its true cost; the m - 1 rivals are drawn from the prior and report
/// truthfully.
struct FocalEnvironment {
  AgentType focal;
  Prior prior;
  std::size_t sellers;
  MechanismParams params;
  VerificationRule rule;
};

namespace detail {

inline void validate_environment(const FocalEnvironment& env, std::size_t reps) {
  require(env.sellers >= 2, "at least two sellers are required");
  require(reps >= 1, "at least one replication is required");
  env.params.validate();
}

// Focal utility for each reported quality in `reports`, one replication.
inline void focal_replication(const FocalEnvironment& env, std::span<const double> reports,
                              const RngStream& rep, std::span<double> out) {
  const auto rivals = sample_types(env.prior, env.sellers - 1, rep.derive("rivals"));
  std::vector<Action> actions;
  actions.reserve(env.sellers);
  actions.push_back(Action::opt_out());
  for (const auto& r : rivals) actions.push_back(Action::participate(Report::truthful(r)));

  GaussianDataSource data(rep.derive("data"));
  for (std::size_t g = 0; g < reports.size(); ++g) {
    actions[0] = Action::participate(Report(env.focal.cost, reports[g]));
    AuctionOutcome outcome = run_second_score(actions, env.params);
    if (outcome.winner != std::size_t{0}) {
      out[g] = 0.0;
      continue;
    }
    verify_delivery(outcome, env.focal.inv_fisher, reports[g], env.rule, data);
    out[g] = seller_utility(outcome, 0, env.focal.cost);
  }
}

// reps x grid matrix of focal utilities, row-major.
inline std::vector<double> focal_utility_matrix(const FocalEnvironment& env,
                                                std::span<const double> reports,
                                                std::size_t reps, const RngStream& rng,
                                                unsigned threads) {
  std::vector<double> values(reps * reports.size());
  parallel_for(reps, threads, [&](std::size_t r) {
    focal_replication(env, reports, rng.derive(r),
                      std::span<double>(values).subspan(r * reports.size(), reports.size()));
  });
  return values;
}

inline UtilityEstimate column_estimate(std::span<const double> values, std::size_t cols,
                                       std::size_t col) {
  const std::size_t rows = values.size() / cols;
  std::vector<double> column(rows);
  for (std::size_t r = 0; r < rows; ++r) column[r] = values[r * cols + col];
  return UtilityEstimate::from_samples(column);
}

}  // namespace detail

/// Interim expected utility of the focal seller for one reported quality.
inline UtilityEstimate interim_utility(const FocalEnvironment& env,
                                       double reported_inv_fisher, std::size_t reps,
                                       const RngStream& rng, unsigned threads = 1) {
  detail::validate_environment(env, reps);
  const double report[] = {reported_inv_fisher};
  const auto values = detail::focal_utility_matrix(env, report, reps, rng, threads);
  return UtilityEstimate::from_samples(values);
}

struct BestResponseCurve {
  std::vector<double> report_grid;
  std::vector<UtilityEstimate> utilities;
  /// Report with the largest mean; ties go to the smallest report.
  double argmax_report = 0.0;
  std::size_t argmax_index = 0;
};

inline BestResponseCurve best_response_curve(const FocalEnvironment& env,
                                             std::span<const double> report_grid,
                                             std::size_t reps, const RngStream& rng,
                                             unsigned threads = 1) {
  detail::validate_environment(env, reps);
  detail::require(!report_grid.empty(), "report grid must be nonempty");
  for (std::size_t g = 0; g < report_grid.size(); ++g) {
    detail::require(detail::finite_positive(report_grid[g]), "report grid must be positive");
    detail::require(g == 0 || report_grid[g] > report_grid[g - 1],
                    "report grid must be strictly increasing");
  }

  const auto values = detail::focal_utility_matrix(env, report_grid, reps, rng, threads);
  BestResponseCurve curve;
  curve.report_grid.assign(report_grid.begin(), report_grid.end());
  curve.utilities.reserve(report_grid.size());
  for (std::size_t g = 0; g < report_grid.size(); ++g) {
    curve.utilities.push_back(detail::column_estimate(values, report_grid.size(), g));
    if (curve.utilities[g].mean > curve.utilities[curve.argmax_index].mean) {
      curve.argmax_index = g;
    }
  }
  curve.argmax_report = curve.report_grid[curve.argmax_index];
  return curve;
}

/// Points lo, lo + step, ... up to hi (inclusive, to rounding).
inline std::vector<double> linear_grid(double lo, double hi, double step) {
  detail::require(step > 0.0 && hi >= lo, "grid requires step > 0 and hi >= lo");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

/// Reported qualities truth + k * step for integer k, kept within
/// [truth - below, truth + above] and within the quality bounds.
struct ReportGridSpec {
  double below = 0.0;
  double above = 0.0;
  double step = 0.25;
};

inline std::vector<double> report_grid_around(double truth, const ReportGridSpec& spec,
                                              const Bounds& bounds) {
  detail::require(spec.step > 0.0 && spec.below >= 0.0 && spec.above >= 0.0,
                  "report grid spec requires step > 0 and nonnegative offsets");
  const double lo = std::max(truth - spec.below, bounds.v_lo());
  const double hi = std::min(truth + spec.above, bounds.v_hi());
  constexpr double kSlack = 1e-9;
  const auto k_lo = static_cast<long>(std::ceil((lo - truth) / spec.step - kSlack));
  const auto k_hi = static_cast<long>(std::floor((hi - truth) / spec.step + kSlack));
  std::vector<double> out;
  for (long k = k_lo; k <= k_hi; ++k) out.push_back(truth + static_cast<double>(k) * spec.step);
  return out;
}

struct ParticipationCell {
  AgentType type;
  double optimal_report;
  UtilityEstimate optimal_report_utility;
  /// Strictly positive expected utility at the optimal report.
  bool participates;
};

/// Best response for every type in the grid; the focal type in `env` is
/// replaced by each grid entry in turn.
inline std::vector<ParticipationCell> participation_map(
    std::span<const AgentType> type_grid, const ReportGridSpec& report_spec,
    const Bounds& bounds, FocalEnvironment env, std::size_t reps, const RngStream& rng,
    unsigned threads = 1) {
  std::vector<ParticipationCell> cells;
  cells.reserve(type_grid.size());
  for (const auto& type : type_grid) {
    detail::require(type.within(bounds), "participation grid type lies outside the bounds");
    env.focal = type;
    const auto grid = report_grid_around(type.inv_fisher, report_spec, bounds);
    const auto curve = best_response_curve(env, grid, reps, rng, threads);
    const auto& best = curve.utilities[curve.argmax_index];
    cells.push_back({type, curve.argmax_report, best, best.mean > 0.0});
  }
  return cells;
}

/// Fraction of replications in which a delivery of n fresh N(0, true_V)
/// samples fails the rule against the reported quality.
inline double empirical_failure_prob(double true_inv_fisher, double reported_inv_fisher,
                                     std::size_t n, const VerificationRule& rule,
                                     std::size_t reps, const RngStream& rng,
                                     unsigned threads = 1) {
  detail::require(n >= 2, "empirical_failure_prob: n must be >= 2");
  detail::require(reps >= 1, "empirical_failure_prob: reps must be >= 1");
  std::vector<unsigned char> failed(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    GaussianDataSource data(rng.derive(r));
    const auto samples = uses_samples(rule) ? data.draw(n, true_inv_fisher)
                                            : std::span<const double>{};
    failed[r] = verify(rule, samples, reported_inv_fisher, true_inv_fisher) ? 0 : 1;
  });
  std::size_t fails = 0;
  for (auto f : failed) fails += f;
  return static_cast<double>(fails) / static_cast<double>(reps);
}

// ---------------------------------------------------------------------------
// Winning advantage ratio

/// A score distribution that can sample conditionally on exceeding s.
template <class D>
concept ScoreDistribution = requires(const D& d, double s, Generator& g) {
  { d.sample_above(s, g) } -> std::convertible_to<double>;
  { d.upper() } -> std::convertible_to<double>;
};

/// Uniform(lo, hi) scores; truncation to (s, hi) is exact by inversion.
struct UniformScores {
  double lo;
  double hi;

  double upper() const { return hi; }
  double sample_above(double s, Generator& g) const {
    const double a = std::max(lo, s);
    return a + (hi - a) * g.uniform_open();
  }
};

/// Scores c * V induced by a type prior; truncation by rejection.
class PriorScores {
 public:
  explicit PriorScores(Prior prior, std::size_t max_attempts = 1'000'000)
      : prior_(prior), max_attempts_(max_attempts) {}

  double upper() const { return prior_.cost().hi * prior_.inv_fisher().hi; }

  double sample_above(double s, Generator& g) const {
    for (std::size_t i = 0; i < max_attempts_; ++i) {
      const double x = prior_.sample(g).true_score();
      if (x > s) return x;
    }
    throw DegenerateConditioningError("score prior places (almost) no mass above s");
  }

 private:
  Prior prior_;
  std::size_t max_attempts_;
};

struct KappaEstimate {
  double value = 0.0;
  /// Delta-method standard error of the ratio estimator.
  double std_error = 0.0;
  std::size_t reps = 0;
};

/// kappa(s) = E[S1 / sqrt(S2) | S1 = s] / E[sqrt(S2) | S1 = s], estimated by
/// drawing the m - 1 remaining scores from the prior truncated to (s, inf)
/// and taking their minimum as S2.
template <ScoreDistribution Dist>
KappaEstimate kappa(double s, const Dist& dist, std::size_t m, std::size_t reps,
                    const RngStream& rng, unsigned threads = 1) {
  detail::require(m >= 2, "kappa: m must be >= 2");
  detail::require(reps >= 1, "kappa: reps must be >= 1");
  detail::require(std::isfinite(s) && s >= 0.0, "kappa: s must be nonnegative");
  if (s >= dist.upper()) {
    throw DegenerateConditioningError("kappa: s is at or above the support's upper end");
  }

  std::vector<double> inv_root(reps), root(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    Generator g = rng.derive(r).generator();
    double runner_up = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < m; ++j) runner_up = std::min(runner_up, dist.sample_above(s, g));
    root[r] = std::sqrt(runner_up);
    inv_root[r] = 1.0 / root[r];
  });

  const double n = static_cast<double>(reps);
  const double a = compensated_sum(inv_root) / n;
  const double b = compensated_sum(root) / n;
  KappaEstimate est;
  est.reps = reps;
  est.value = s * a / b;
  if (reps > 1) {
    std::vector<double> sq(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      const double d = (s / b) * (inv_root[r] - (a / b) * root[r]);
      sq[r] = d * d;
    }
    est.std_error = std::sqrt(compensated_sum(sq) / (n - 1.0) / n);
  }
  return est;
}

/// Truthful participation is individually rational in large instances when
/// kappa(c V) <= 1 - alpha - epsilon.
inline bool opt_in_condition(double kappa_value, double alpha, double epsilon) {
  detail::require(alpha > 0.0 && alpha < 1.0, "opt_in_condition: alpha must lie in (0, 1)");
  detail::require(epsilon >= 0.0, "opt_in_condition: epsilon must be nonnegative");
  return kappa_value <= 1.0 - alpha - epsilon;
}

}  // namespace infoprocure
