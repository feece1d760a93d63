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

#include "experiments.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>

#include "infoprocure/infoprocure.hpp"
#include "svg.hpp"

namespace infoprocure::cli {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string str(std::size_t x) { return std::to_string(x); }

std::vector<AgentType> truthful_population(const ExperimentConfig& c, const RngStream& rep) {
  return sample_types(c.prior, c.sellers, rep.derive("types"));
}

// ---------------------------------------------------------------------------

ExperimentResult run_auction(const ExperimentConfig& c, unsigned threads, bool plot) {
  ExperimentResult res{{table_header(c.kind), {}}, {}};
  const RngStream base = RngStream(c.seed).derive(kind_name(c.kind));
  const std::size_t count = c.auction.auctions;
  std::vector<svg::LinePanel> panels;

  for (const auto& rule : c.rules) {
    for (double beta : c.betas) {
      const auto params = MechanismParams::for_bounds(beta, c.bounds, c.rho);
      std::vector<std::vector<std::string>> rows(count);
      std::vector<double> regret(count), bound(count);
      parallel_for(count, threads, [&](std::size_t a) {
        const RngStream rep = base.derive(a);
        const auto types = truthful_population(c, rep);
        std::vector<Action> actions;
        actions.reserve(types.size());
        std::vector<double> scores;
        for (const auto& t : types) {
          actions.push_back(Action::participate(Report::truthful(t)));
          scores.push_back(t.true_score());
        }
        std::sort(scores.begin(), scores.end());

        const auto run = run_with_verification(actions, types, params, rule, rep);
        const auto& o = run.outcome;
        const std::size_t w = *o.winner;
        const double loss =
            principal_loss(beta, types[w].inv_fisher, o.quantity, o.unit_payment, c.rho);
        const double s1 = scores[0];
        const double s2 = scores.size() >= 2 ? scores[1] : params.single_bidder_fallback_score;
        regret[a] = relative_regret(loss, beta, s1);
        bound[a] = std::sqrt(s2 / s1) - 1.0;
        rows[a] = {rule_name(rule),
                   format_real(beta),
                   str(a),
                   str(w),
                   format_real(o.winner_score),
                   format_real(o.second_score),
                   format_real(o.unit_payment),
                   format_real(o.quantity),
                   o.voided ? "1" : "0",
                   format_real(run.utilities[w]),
                   format_real(loss),
                   format_real(first_best_loss(beta, s1)),
                   format_real(regret[a]),
                   format_real(bound[a])};
      });
      for (auto& r : rows) res.table.rows.push_back(std::move(r));
      if (plot) {
        svg::LinePanel p{fmt::format("{}, beta={}", rule_name(rule), beta), "regret bound",
                         "relative regret", {}, false, {}, {}};
        std::vector<std::size_t> order(count);
        for (std::size_t i = 0; i < count; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return bound[x] < bound[y]; });
        svg::Series realized{"realized", {}, {}, {}}, ceiling{"bound", {}, {}, {}};
        for (auto i : order) {
          realized.x.push_back(bound[i]);
          realized.y.push_back(regret[i]);
          ceiling.x.push_back(bound[i]);
          ceiling.y.push_back(bound[i]);
        }
        p.series = {realized, ceiling};
        panels.push_back(std::move(p));
      }
    }
  }
  if (plot) res.plot = svg::render_lines("Relative regret per auction", panels, 3);
  return res;
}

// ---------------------------------------------------------------------------

ExperimentResult run_best_response(const ExperimentConfig& c, unsigned threads, bool plot) {
  ExperimentResult res{{table_header(c.kind), {}}, {}};
  const RngStream base = RngStream(c.seed).derive(kind_name(c.kind));
  const auto grid = c.best_response.report_grid.points();
  std::vector<svg::LinePanel> panels;

  for (const auto& rule : c.rules) {
    for (double truth : c.best_response.true_variances) {
      svg::LinePanel panel{fmt::format("{}, true variance {}", rule_name(rule), truth),
                           "reported variance", "expected utility", {}, false, truth, 0.0};
      for (double beta : c.betas) {
        const FocalEnvironment env{AgentType(c.best_response.cost, truth), c.prior, c.sellers,
                                   MechanismParams::for_bounds(beta, c.bounds, c.rho), rule};
        // Same base stream for every curve: rivals and data are shared
        // across rules, betas and true variances.
        const auto curve = best_response_curve(env, grid, c.reps, base, threads);
        svg::Series series{fmt::format("beta={}", beta), grid, {}, curve.argmax_report};
        for (std::size_t g = 0; g < grid.size(); ++g) {
          const auto& u = curve.utilities[g];
          res.table.rows.push_back({rule_name(rule), format_real(beta), format_real(truth),
                                    format_real(grid[g]), format_real(u.mean),
                                    format_real(u.std_error)});
          series.y.push_back(u.mean / std::sqrt(beta));
        }
        panel.series.push_back(std::move(series));
      }
      panel.y_label = "utility / sqrt(beta)";
      panels.push_back(std::move(panel));
    }
  }
  if (plot) {
    res.plot = svg::render_lines("Expected utility against reported variance", panels,
                                 static_cast<int>(c.best_response.true_variances.size()));
  }
  return res;
}

// ---------------------------------------------------------------------------

ExperimentResult run_participation(const ExperimentConfig& c, unsigned threads, bool plot) {
  ExperimentResult res{{table_header(c.kind), {}}, {}};
  const RngStream base = RngStream(c.seed).derive(kind_name(c.kind));
  const auto costs = c.participation.cost_grid.points();
  const auto variances = c.participation.variance_grid.points();
  std::vector<AgentType> types;
  for (double v : variances) {
    for (double cost : costs) types.emplace_back(cost, v);
  }
  std::vector<svg::HeatPanel> panels;

  for (const auto& rule : c.rules) {
    for (double beta : c.betas) {
      const FocalEnvironment env{types.front(), c.prior, c.sellers,
                                 MechanismParams::for_bounds(beta, c.bounds, c.rho), rule};
      const auto cells = participation_map(types, c.participation.report_grid, c.bounds, env,
                                           c.reps, base, threads);
      svg::HeatPanel panel{fmt::format("{}, beta={}", rule_name(rule), beta), "cost",
                           "true variance", costs, variances, {}};
      for (const auto& cell : cells) {
        res.table.rows.push_back(
            {rule_name(rule), format_real(beta), format_real(cell.type.cost),
             format_real(cell.type.inv_fisher), format_real(cell.optimal_report),
             format_real(cell.optimal_report_utility.mean),
             format_real(cell.optimal_report_utility.std_error), cell.participates ? "1" : "0"});
        panel.values.push_back(cell.optimal_report_utility.mean);
      }
      panels.push_back(std::move(panel));
    }
  }
  if (plot) res.plot = svg::render_heat("Utility at the optimal report", panels);
  return res;
}

// ---------------------------------------------------------------------------

template <ScoreDistribution Dist>
ExperimentResult kappa_curves(const ExperimentConfig& c, const Dist& dist, unsigned threads,
                              bool plot) {
  ExperimentResult res{{table_header(c.kind), {}}, {}};
  const RngStream base = RngStream(c.seed).derive(kind_name(c.kind));
  const auto grid = c.kappa.s_grid.points();
  svg::LinePanel panel{"kappa(s)", "score s", "kappa", {}, false, {}, {}};
  for (std::size_t m : c.kappa.sellers) {
    const RngStream stream = base.derive(static_cast<std::uint64_t>(m));
    svg::Series series{fmt::format("m={}", m), grid, {}, {}};
    for (double s : grid) {
      const auto est = kappa(s, dist, m, c.reps, stream, threads);
      res.table.rows.push_back(
          {str(m), format_real(s), format_real(est.value), format_real(est.std_error)});
      series.y.push_back(est.value);
    }
    panel.series.push_back(std::move(series));
  }
  if (plot) res.plot = svg::render_lines("Winning advantage ratio", {panel}, 1);
  return res;
}

ExperimentResult run_kappa(const ExperimentConfig& c, unsigned threads, bool plot) {
  if (c.kappa.score_prior == "prior") return kappa_curves(c, PriorScores(c.prior), threads, plot);
  return kappa_curves(c, UniformScores{c.kappa.score_lo, c.kappa.score_hi}, threads, plot);
}

// ---------------------------------------------------------------------------

ExperimentResult run_failure(const ExperimentConfig& c, unsigned threads, bool plot) {
  ExperimentResult res{{table_header(c.kind), {}}, {}};
  const RngStream base = RngStream(c.seed).derive(kind_name(c.kind));
  const auto& f = c.failure;
  std::vector<svg::LinePanel> panels;
  for (double reported : f.reported_variances) {
    svg::LinePanel panel{fmt::format("reported variance {}", reported), "n", "failure probability",
                         {}, true, {}, {}};
    for (const auto& rule : c.rules) {
      svg::Series series{rule_name(rule), {}, {}, {}};
      for (std::size_t n : f.sample_sizes) {
        const double p = empirical_failure_prob(f.true_variance, reported, n, rule, c.reps,
                                                base.derive(static_cast<std::uint64_t>(n)),
                                                threads);
        res.table.rows.push_back({rule_name(rule), format_real(f.true_variance),
                                  format_real(reported), str(n), str(c.reps), format_real(p)});
        series.x.push_back(static_cast<double>(n));
        series.y.push_back(p);
      }
      panel.series.push_back(std::move(series));
    }
    panels.push_back(std::move(panel));
  }
  if (plot) res.plot = svg::render_lines("Verification failure frequency", panels, 2);
  return res;
}

// ---------------------------------------------------------------------------

std::string slack_or_inf(auto&& fn) {
  try {
    return format_real(fn());
  } catch (const UnboundedSlackError&) {
    return "inf";
  }
}

ExperimentResult run_slack(const ExperimentConfig& c, unsigned, bool plot) {
  ExperimentResult res{{table_header(c.kind), {}}, {}};
  const auto& s = c.slack;
  const GaussianTailEnvelope env(c.bounds.v_hi(), s.c1, s.c2, s.c3, s.c4);
  svg::Series lower{"slack_lower", {}, {}, {}}, upper{"slack_upper", {}, {}, {}};
  for (double beta : s.betas) {
    const double n = n_lower_bound(beta, c.bounds);
    const auto lo = slack_or_inf([&] { return slack_lower(n, c.bounds, env); });
    const auto hi = slack_or_inf([&] { return slack_upper(n, c.bounds, env); });
    res.table.rows.push_back({format_real(beta), format_real(n), lo, hi});
    lower.x.push_back(beta);
    lower.y.push_back(std::strtod(lo.c_str(), nullptr));
    upper.x.push_back(beta);
    upper.y.push_back(std::strtod(hi.c_str(), nullptr));
  }
  if (plot) {
    svg::LinePanel panel{"Equilibrium slacks", "beta", "slack", {lower, upper}, true, {}, {}};
    res.plot = svg::render_lines("Equilibrium slacks", {panel}, 1);
  }
  return res;
}

}  // namespace

std::string Table::to_csv() const {
  std::string out;
  const auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

const std::vector<std::string>& table_header(ExperimentKind kind) {
  static const std::map<ExperimentKind, std::vector<std::string>> headers = {
      {ExperimentKind::kAuction,
       {"rule", "beta", "auction", "winner", "winner_score", "second_score", "unit_payment",
        "quantity", "voided", "winner_utility", "principal_loss", "first_best_loss",
        "relative_regret", "regret_bound"}},
      {ExperimentKind::kBestResponse,
       {"rule", "beta", "true_variance", "reported_variance", "utility_mean", "utility_se"}},
      {ExperimentKind::kParticipationMap,
       {"rule", "beta", "cost", "true_variance", "optimal_report", "utility_mean", "utility_se",
        "participates"}},
      {ExperimentKind::kKappaCurve, {"m", "s", "kappa_hat", "se"}},
      {ExperimentKind::kFailureProb,
       {"rule", "true_variance", "reported_variance", "n", "reps", "failure_prob"}},
      {ExperimentKind::kSlackBounds, {"beta", "N", "slack_lower", "slack_upper"}},
  };
  return headers.at(kind);
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads, bool plot) {
  threads = std::max(1u, threads);
  switch (config.kind) {
    case ExperimentKind::kAuction: return run_auction(config, threads, plot);
    case ExperimentKind::kBestResponse: return run_best_response(config, threads, plot);
    case ExperimentKind::kParticipationMap: return run_participation(config, threads, plot);
    case ExperimentKind::kKappaCurve: return run_kappa(config, threads, plot);
    case ExperimentKind::kFailureProb: return run_failure(config, threads, plot);
    case ExperimentKind::kSlackBounds: return run_slack(config, threads, plot);
  }
  throw Error("unknown experiment kind");
}

}  // namespace infoprocure::cli
