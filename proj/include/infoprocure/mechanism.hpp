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

// Second-price-per-information auction algebra. Everything here is
// deterministic; the ex post quality test is composed in simulate.hpp.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>

#include "infoprocure/core.hpp"

namespace infoprocure {

struct AuctionOutcome {
  /// Index into the action list, or empty when nobody opted in.
  std::optional<std::size_t> winner;
  double winner_score = std::numeric_limits<double>::quiet_NaN();
  double second_score = std::numeric_limits<double>::quiet_NaN();
  /// Per-sample price paid to the winner.
  double unit_payment = std::numeric_limits<double>::quiet_NaN();
  /// Real-valued number of samples bought.
  double quantity = std::numeric_limits<double>::quiet_NaN();
  /// Set when the winner's delivery failed verification.
  bool voided = false;

  bool has_winner() const { return winner.has_value(); }
};

/// Loss-minimizing quantity at a fixed unit price: argmin_n beta (V/n)^rho + p n.
inline double optimal_quantity(double beta, double inv_fisher, double unit_price,
                               double rho = 1.0) {
  detail::require(detail::finite_positive(beta) && detail::finite_positive(inv_fisher) &&
                      detail::finite_positive(unit_price),
                  "optimal_quantity: arguments must be positive");
  detail::require(rho > 0.0 && rho <= 1.0, "optimal_quantity: rho must lie in (0, 1]");
  if (rho == 1.0) return std::sqrt(beta * inv_fisher / unit_price);
  return std::pow(beta * rho * std::pow(inv_fisher, rho) / unit_price, 1.0 / (rho + 1.0));
}

/// Quantity rule of the mechanism, written in terms of the second score.
/// Equals optimal_quantity at the unit price second_score / reported_inv_fisher.
inline double mechanism_quantity(double beta, double reported_inv_fisher,
                                 double second_score, double rho = 1.0) {
  if (rho == 1.0) return std::sqrt(beta) * reported_inv_fisher / std::sqrt(second_score);
  return std::pow(beta * rho / second_score, 1.0 / (rho + 1.0)) * reported_inv_fisher;
}

/// Buyer's loss beta (V/n)^rho + p n.
inline double principal_loss(double beta, double true_inv_fisher, double quantity,
                             double unit_payment, double rho = 1.0) {
  if (!(quantity > 0.0)) throw DomainError("principal_loss: quantity must be positive");
  const double error = rho == 1.0 ? true_inv_fisher / quantity
                                  : std::pow(true_inv_fisher / quantity, rho);
  return beta * error + unit_payment * quantity;
}

/// Minimal loss when buying optimally at score s:
/// (1 + rho) rho^(-rho/(rho+1)) beta^(1/(rho+1)) s^(rho/(rho+1)), which is
/// 2 sqrt(beta s) at rho = 1.
inline double optimal_loss_at_score(double beta, double s, double rho = 1.0) {
  if (rho == 1.0) return 2.0 * std::sqrt(beta * s);
  const double e = rho / (rho + 1.0);
  return (1.0 + rho) * std::pow(rho, -e) * std::pow(beta, 1.0 / (rho + 1.0)) *
         std::pow(s, e);
}

/// First-best loss 2 sqrt(beta s1) at the lowest truthful score.
inline double first_best_loss(double beta, double first_best_score) {
  return optimal_loss_at_score(beta, first_best_score, 1.0);
}

/// Relative excess of a realized loss over the first-best loss.
inline double relative_regret(double realized_loss, double beta, double first_best_score) {
  detail::require(first_best_score > 0.0, "relative_regret: first-best score must be positive");
  const double fb = first_best_loss(beta, first_best_score);
  return (realized_loss - fb) / fb;
}

/// Scores, selects the lowest-score participant, pays the runner-up's score
/// per unit of the winner's reported information, and sets the quantity.
/// Returns the no-winner outcome when nobody opts in.
inline AuctionOutcome run_second_score(std::span<const Action> actions,
                                       const MechanismParams& params) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  AuctionOutcome out;
  double best = kInf, runner_up = kInf;
  std::size_t participants = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (!actions[i].participates()) continue;
    ++participants;
    const double s = score(actions[i].report());
    // Strict comparison keeps the lowest index on ties.
    if (!out.winner || s < best) {
      runner_up = best;
      best = s;
      out.winner = i;
    } else if (s < runner_up) {
      runner_up = s;
    }
  }
  if (!out.winner) return out;

  const double v_tilde = actions[*out.winner].report().reported_inv_fisher;
  out.winner_score = best;
  out.second_score = participants >= 2 ? runner_up : params.single_bidder_fallback_score;
  out.unit_payment = out.second_score / v_tilde;
  out.quantity = mechanism_quantity(params.beta, v_tilde, out.second_score, params.rho);
  return out;
}

/// Seller utility (p* - c) n* for the winner on a delivered contract,
/// -c n* on a voided one, zero for everyone else.
inline double seller_utility(const AuctionOutcome& outcome, std::size_t agent,
                             double cost) {
  if (!outcome.winner || *outcome.winner != agent) return 0.0;
  if (outcome.voided) return -cost * outcome.quantity;
  return (outcome.unit_payment - cost) * outcome.quantity;
}

}  // namespace infoprocure
