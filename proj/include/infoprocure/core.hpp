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

// Domain types shared by every layer: seller types, the type-space rectangle,
// the uniform product prior, bids, and mechanism parameters.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "infoprocure/rng.hpp"

namespace infoprocure {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class EmptyPopulationError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

inline bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace detail

/// The rectangle [c_lo, c_hi] x [v_lo, v_hi] that contains every type and
/// every admissible report.
class Bounds {
 public:
  Bounds(double c_lo, double c_hi, double v_lo, double v_hi)
      : c_lo_(c_lo), c_hi_(c_hi), v_lo_(v_lo), v_hi_(v_hi) {
    detail::require(detail::finite_positive(c_lo) && detail::finite_positive(v_lo),
                    "bounds must be positive");
    detail::require(std::isfinite(c_hi) && c_lo < c_hi,
                    "bounds require c_lo < c_hi");
    detail::require(std::isfinite(v_hi) && v_lo < v_hi,
                    "bounds require v_lo < v_hi");
  }

  double c_lo() const { return c_lo_; }
  double c_hi() const { return c_hi_; }
  double v_lo() const { return v_lo_; }
  double v_hi() const { return v_hi_; }

  /// Smallest and largest attainable scores.
  double s_lo() const { return c_lo_ * v_lo_; }
  double s_hi() const { return c_hi_ * v_hi_; }

  bool contains(double cost, double inv_fisher) const {
    return cost >= c_lo_ && cost <= c_hi_ && inv_fisher >= v_lo_ &&
           inv_fisher <= v_hi_;
  }

  friend bool operator==(const Bounds&, const Bounds&) = default;

 private:
  double c_lo_, c_hi_, v_lo_, v_hi_;
};

/// A seller's private type: per-sample cost and inverse Fisher information
/// (the per-sample variance in the Gaussian location model).
struct AgentType {
  double cost;
  double inv_fisher;

  AgentType(double cost_, double inv_fisher_) : cost(cost_), inv_fisher(inv_fisher_) {
    detail::require(detail::finite_positive(cost) && detail::finite_positive(inv_fisher),
                    "agent type fields must be positive");
  }

  double true_score() const { return cost * inv_fisher; }

  bool within(const Bounds& b) const { return b.contains(cost, inv_fisher); }

  friend bool operator==(const AgentType&, const AgentType&) = default;
};

/// A sealed bid: per-sample price and claimed inverse Fisher information.
struct Report {
  double price;
  double reported_inv_fisher;

  Report(double price_, double reported_inv_fisher_)
      : price(price_), reported_inv_fisher(reported_inv_fisher_) {
    detail::require(detail::finite_positive(price) &&
                        detail::finite_positive(reported_inv_fisher),
                    "report fields must be positive");
  }

  /// The bid an agent of type `t` makes when reporting truthfully.
  static Report truthful(const AgentType& t) { return {t.cost, t.inv_fisher}; }

  bool within(const Bounds& b) const { return b.contains(price, reported_inv_fisher); }

  friend bool operator==(const Report&, const Report&) = default;
};

/// Price per unit of Fisher information.
inline double score(const Report& r) { return r.price * r.reported_inv_fisher; }

/// Either opt out, or participate with a report.
class Action {
 public:
  static Action opt_out() { return Action(); }
  static Action participate(Report r) { return Action(r); }

  bool participates() const { return report_.has_value(); }
  const Report& report() const { return report_.value(); }

  friend bool operator==(const Action&, const Action&) = default;

 private:
  Action() = default;
  explicit Action(Report r) : report_(r) {}

  std::optional<Report> report_;
};

struct Interval {
  double lo;
  double hi;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Independent uniform cost and quality marginals; agents are i.i.d.
/// Degenerate (point-mass) intervals are allowed.
class Prior {
 public:
  Prior(Interval cost, Interval inv_fisher) : cost_(cost), inv_fisher_(inv_fisher) {
    detail::require(detail::finite_positive(cost.lo) && std::isfinite(cost.hi) &&
                        cost.lo <= cost.hi,
                    "prior cost interval must be positive and ordered");
    detail::require(detail::finite_positive(inv_fisher.lo) &&
                        std::isfinite(inv_fisher.hi) && inv_fisher.lo <= inv_fisher.hi,
                    "prior quality interval must be positive and ordered");
  }

  const Interval& cost() const { return cost_; }
  const Interval& inv_fisher() const { return inv_fisher_; }

  bool within(const Bounds& b) const {
    return b.contains(cost_.lo, inv_fisher_.lo) && b.contains(cost_.hi, inv_fisher_.hi);
  }

  /// Draw one type.
  AgentType sample(Generator& gen) const {
    const double c = gen.uniform(cost_.lo, cost_.hi);
    const double v = gen.uniform(inv_fisher_.lo, inv_fisher_.hi);
    return {c, v};
  }

 private:
  Interval cost_;
  Interval inv_fisher_;
};

/// Draw m i.i.d. types; agent i uses the substream `rng / i`.
inline std::vector<AgentType> sample_types(const Prior& prior, std::size_t m,
                                           const RngStream& rng) {
  if (m == 0) throw EmptyPopulationError("sample_types: population size must be >= 1");
  std::vector<AgentType> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Generator gen = rng.derive(i).generator();
    out.push_back(prior.sample(gen));
  }
  return out;
}

enum class TieBreak { kLowestIndex };

struct MechanismParams {
  double beta;
  /// Loss exponent; 1 is the parametric root-n case.
  double rho = 1.0;
  /// Used as the second score when a single seller opts in.
  double single_bidder_fallback_score;
  TieBreak tie_break = TieBreak::kLowestIndex;

  /// Parameters with the fallback score set to the largest attainable score.
  static MechanismParams for_bounds(double beta, const Bounds& b, double rho = 1.0) {
    MechanismParams p{beta, rho, b.s_hi(), TieBreak::kLowestIndex};
    p.validate(b);
    return p;
  }

  void validate() const {
    detail::require(detail::finite_positive(beta), "beta must be positive");
    detail::require(std::isfinite(rho) && rho > 0.0 && rho <= 1.0,
                    "rho must lie in (0, 1]");
    detail::require(detail::finite_positive(single_bidder_fallback_score),
                    "fallback score must be positive");
  }

  void validate(const Bounds& b) const {
    validate();
    detail::require(single_bidder_fallback_score >= b.s_hi(),
                    "fallback score must be at least the largest attainable score");
  }
};

/// Deterministic lower bound on the quantity bought under the root-n
/// mechanism for any feasible report profile: sqrt(beta) v_lo / sqrt(s_hi).
inline double n_lower_bound(double beta, const Bounds& b) {
  detail::require(detail::finite_positive(beta), "beta must be positive");
  return std::sqrt(beta) * b.v_lo() / std::sqrt(b.s_hi());
}

/// Number of discrete samples generated for a real quantity: floor, at least 1.
inline std::size_t sample_count(double quantity) {
  if (!(quantity >= 1.0)) return 1;
  return static_cast<std::size_t>(std::floor(quantity));
}

}  // namespace infoprocure
