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

// Ex post quality tests on delivered Gaussian samples, and the finite-sample
// slack radii obtained by inverting tail envelopes of the test statistic.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <span>
#include <string>
#include <variant>

#include "infoprocure/core.hpp"
#include "infoprocure/normal.hpp"

namespace infoprocure {

class UnboundedSlackError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Sample statistics

/// Central moments with divisor n.
struct CentralMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
};

inline CentralMoments central_moments(std::span<const double> x) {
  if (x.size() < 2) throw InsufficientDataError("at least two samples are required");
  CentralMoments out;
  out.n = x.size();
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x) sum += v;
  out.mean = sum / n;
  double s2 = 0.0, s4 = 0.0;
  for (double v : x) {
    const double d = v - out.mean;
    const double d2 = d * d;
    s2 += d2;
    s4 += d2 * d2;
  }
  out.m2 = s2 / n;
  out.m4 = s4 / n;
  return out;
}

/// (1/n) sum (x - mean)^2.
inline double sample_variance(std::span<const double> x) { return central_moments(x).m2; }

namespace detail {

// S^2 - z / sqrt(n) * sqrt(m4 - S^4), radicand clamped at zero.
inline double lcb_from_moments(const CentralMoments& m, double z) {
  const double radicand = std::max(0.0, m.m4 - m.m2 * m.m2);
  return m.m2 - z / std::sqrt(static_cast<double>(m.n)) * std::sqrt(radicand);
}

}  // namespace detail

/// One-sided lower confidence bound for the variance at level 1 - alpha.
inline double lcb_statistic(std::span<const double> x, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("lcb_statistic: alpha must lie in (0, 1)");
  const CentralMoments m = central_moments(x);
  return detail::lcb_from_moments(m, normal_quantile(1.0 - alpha));
}

// ---------------------------------------------------------------------------
// Verification rules

/// Pass iff S^2 <= reported variance.
struct SampleVarianceRule {
  friend bool operator==(const SampleVarianceRule&, const SampleVarianceRule&) = default;
};

/// Pass iff the lower confidence bound Q_n(alpha) <= reported variance.
class LcbRule {
 public:
  explicit LcbRule(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("LCB alpha must lie in (0, 1)");
    z_ = normal_quantile(1.0 - alpha);
  }
  double alpha() const { return alpha_; }
  /// Standard normal quantile at 1 - alpha.
  double z() const { return z_; }

  friend bool operator==(const LcbRule& a, const LcbRule& b) { return a.alpha_ == b.alpha_; }

 private:
  double alpha_;
  double z_;
};

/// Pass iff the true inverse Fisher information does not exceed the report.
struct ExactOracleRule {
  friend bool operator==(const ExactOracleRule&, const ExactOracleRule&) = default;
};

using VerificationRule = std::variant<SampleVarianceRule, LcbRule, ExactOracleRule>;

/// "sample-variance", "lcb(0.05)", "exact-oracle".
inline std::string rule_name(const VerificationRule& rule) {
  struct Visitor {
    std::string operator()(const SampleVarianceRule&) const { return "sample-variance"; }
    std::string operator()(const ExactOracleRule&) const { return "exact-oracle"; }
    std::string operator()(const LcbRule& r) const {
      char buf[48];
      std::snprintf(buf, sizeof buf, "lcb(%g)", r.alpha());
      return buf;
    }
  };
  return std::visit(Visitor{}, rule);
}

/// Inverse of rule_name. Also accepts "lcb:<alpha>".
inline VerificationRule parse_rule(const std::string& text) {
  if (text == "sample-variance") return SampleVarianceRule{};
  if (text == "exact-oracle") return ExactOracleRule{};
  std::string inner;
  if (text.rfind("lcb(", 0) == 0 && text.size() > 5 && text.back() == ')') {
    inner = text.substr(4, text.size() - 5);
  } else if (text.rfind("lcb:", 0) == 0) {
    inner = text.substr(4);
  } else {
    throw DomainError("unknown verification rule '" + text + "'");
  }
  std::size_t used = 0;
  double alpha = 0.0;
  try {
    alpha = std::stod(inner, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != inner.size()) {
    throw DomainError("malformed LCB level in '" + text + "'");
  }
  return LcbRule(alpha);
}

/// Applies the rule to delivered samples. `true_inv_fisher` is read only by
/// the exact oracle; `samples` is read only by the statistical rules.
inline bool verify(const VerificationRule& rule, std::span<const double> samples,
                   double reported_inv_fisher, double true_inv_fisher) {
  struct Visitor {
    std::span<const double> samples;
    double reported, truth;
    bool operator()(const SampleVarianceRule&) const {
      return sample_variance(samples) <= reported;
    }
    bool operator()(const LcbRule& r) const {
      return detail::lcb_from_moments(central_moments(samples), r.z()) <= reported;
    }
    bool operator()(const ExactOracleRule&) const { return truth <= reported; }
  };
  return std::visit(Visitor{samples, reported_inv_fisher, true_inv_fisher}, rule);
}

inline bool uses_samples(const VerificationRule& rule) {
  return !std::holds_alternative<ExactOracleRule>(rule);
}

// ---------------------------------------------------------------------------
// Tail envelopes and slack radii

/// A density envelope phi_n(u) of the test statistic's deviation and its tail
/// integral zeta_n(u), both nonincreasing in n and u.
template <class E>
concept TailEnvelope = requires(const E& e, double n, double u) {
  { e.phi(n, u) } -> std::convertible_to<double>;
  { e.zeta(n, u) } -> std::convertible_to<double>;
  { e.v_hi() } -> std::convertible_to<double>;
};

/// Sub-Gaussian envelope for the sample variance:
///   phi_n(u)  = C1 sqrt(n) exp(-C2 n u^2 / v_hi^2)
///   zeta_n(u) = C3 exp(-C4 n u^2 / v_hi^2)
/// The constants are order-of-magnitude placeholders, not calibrated bounds.
class GaussianTailEnvelope {
 public:
  explicit GaussianTailEnvelope(double v_hi, double c1 = 1.0, double c2 = 1.0,
                                double c3 = 1.0, double c4 = 1.0)
      : v_hi_(v_hi), c1_(c1), c2_(c2), c3_(c3), c4_(c4) {
    detail::require(detail::finite_positive(v_hi) && detail::finite_positive(c1) &&
                        detail::finite_positive(c2) && detail::finite_positive(c3) &&
                        detail::finite_positive(c4),
                    "envelope constants must be positive");
  }

  double phi(double n, double u) const {
    return c1_ * std::sqrt(n) * std::exp(-c2_ * n * u * u / (v_hi_ * v_hi_));
  }
  double zeta(double n, double u) const {
    return c3_ * std::exp(-c4_ * n * u * u / (v_hi_ * v_hi_));
  }

  /// zeta_n(delta) = level solved for delta (0 when the envelope starts below).
  double zeta_inverse(double n, double level) const {
    const double l = std::log(c3_ / level);
    return l <= 0.0 ? 0.0 : v_hi_ * std::sqrt(l / (c4_ * n));
  }
  double phi_inverse(double n, double level) const {
    const double l = std::log(c1_ * std::sqrt(n) / level);
    return l <= 0.0 ? 0.0 : v_hi_ * std::sqrt(l / (c2_ * n));
  }

  double v_hi() const { return v_hi_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double c3() const { return c3_; }
  double c4() const { return c4_; }

 private:
  double v_hi_, c1_, c2_, c3_, c4_;
};

inline constexpr double kSlackTolerance = 1e-9;

namespace detail {

// Smallest delta in [1e-9, 10 v_hi] with f(delta) <= level, f nonincreasing.
template <class F>
double invert_decreasing(F&& f, double level, double v_hi) {
  double lo = kSlackTolerance;
  double hi = 10.0 * v_hi;
  if (f(lo) <= level) return lo;
  if (f(hi) > level) {
    throw UnboundedSlackError("tail envelope stays above the target level on [1e-9, 10 v_hi]");
  }
  while (hi - lo > kSlackTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace detail

/// Lower-tail detection radius: inf{delta > 0 : zeta_N(delta) <= s_lo / s_hi}.
template <TailEnvelope Envelope>
double slack_lower(double n, const Bounds& bounds, const Envelope& env) {
  detail::require(n >= 1.0, "slack_lower: N must be >= 1");
  return detail::invert_decreasing([&](double d) { return env.zeta(n, d); },
                                   bounds.s_lo() / bounds.s_hi(), env.v_hi());
}

/// Upper-side resolution radius: inf{delta > 0 : phi_N(delta) <= c_lo / s_hi}.
template <TailEnvelope Envelope>
double slack_upper(double n, const Bounds& bounds, const Envelope& env) {
  detail::require(n >= 1.0, "slack_upper: N must be >= 1");
  return detail::invert_decreasing([&](double d) { return env.phi(n, d); },
                                   bounds.c_lo() / bounds.s_hi(), env.v_hi());
}

}  // namespace infoprocure
