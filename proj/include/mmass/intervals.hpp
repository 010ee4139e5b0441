#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "mmass/errors.hpp"
#include "mmass/estimators.hpp"
#include "mmass/numerics.hpp"
#include "mmass/profile.hpp"

namespace mmass {

// Root of log(x)/x = -1/2 on (0, 1).
inline double c0_constant() {
  static const double root = bisect_root([](double x) { return std::log(x) / x + 0.5; }, 0.5, 1.0, 1e-15);
  return root;
}

struct CoeffsA {
  double a1, a2, a3;
};
struct CoeffsB {
  double b1, b2;
};

namespace detail {

inline void require_interval_domain(std::uint64_t n, unsigned r) {
  require(r >= 1, "r must be >= 1");
  require(n > 2ull * r, "requires n > 2r");
}

// n^s / C(n, k)^e in log space
inline double scaled_inverse_binom(std::uint64_t n, double s, std::uint64_t k, double e) {
  return std::exp(s * std::log(static_cast<double>(n)) - e * log_binom(n, k));
}

}  // namespace detail

inline CoeffsA coeffs_a(std::uint64_t n, unsigned r) {
  detail::require_interval_domain(n, r);
  using detail::scaled_inverse_binom;
  const double rd = r;
  const double sqrt2 = std::sqrt(2.0);
  CoeffsA c{};
  c.a1 = sqrt2 * scaled_inverse_binom(n, rd, 2 * r, 0.5) + 2.0 * sqrt2 * scaled_inverse_binom(n, rd, r, 1.0);
  c.a2 = 4.0 * scaled_inverse_binom(n, rd, 2 * r, 0.5) + (26.0 / 3.0) * scaled_inverse_binom(n, rd, r, 1.0) +
         16.0 * rd * scaled_inverse_binom(n, rd, r + 1, 1.0);
  c.a3 = 2.0 * rd * scaled_inverse_binom(n, rd + 1.0, r + 1, 1.0);
  return c;
}

inline CoeffsB coeffs_b(std::uint64_t n, unsigned r) {
  detail::require_interval_domain(n, r);
  using detail::scaled_inverse_binom;
  const double rd = r;
  const double sqrt2 = std::sqrt(2.0);
  CoeffsB c{};
  c.b1 = sqrt2 * scaled_inverse_binom(n, rd, 2 * r, 0.5) + 2.0 * sqrt2 * scaled_inverse_binom(n, rd, r, 1.0);
  c.b2 = 4.0 * scaled_inverse_binom(n, rd, 2 * r, 0.5) + (26.0 / 3.0) * scaled_inverse_binom(n, rd, r, 1.0);
  return c;
}

// n -> infinity limits of the coefficients.
struct CoeffLimits {
  double a1, a2, a3, b2;
};

inline CoeffLimits coeff_limits(unsigned r) {
  require(r >= 1, "r must be >= 1");
  const double rf = std::tgamma(r + 1.0);
  const double r2f = std::tgamma(2.0 * r + 1.0);
  const double r1f = std::tgamma(r + 2.0);
  CoeffLimits l{};
  l.a1 = std::sqrt(2.0) * (2.0 * rf + std::sqrt(r2f));
  l.a2 = (26.0 / 3.0) * rf + 4.0 * std::sqrt(r2f);
  l.a3 = 2.0 * r * r1f;
  l.b2 = l.a2;
  return l;
}

namespace detail {

inline void require_positive_x(double x) { require(x > 0.0 && std::isfinite(x), "x must be a positive real"); }

}  // namespace detail

// Unclamped lower confidence bound from (n, M_{n,r}, C_{n,r}); may be negative.
inline double lower_bound(std::uint64_t n, unsigned r, std::uint64_t m_r, std::uint64_t c_r, double x) {
  detail::require_interval_domain(n, r);
  detail::require_positive_x(x);
  const auto a = coeffs_a(n, r);
  const double nd = static_cast<double>(n);
  const double nr = std::pow(nd, r);
  const double c = static_cast<double>(c_r);
  return gt_estimate(n, r, m_r) - a.a1 / nr * std::sqrt(c * x) - a.a2 / nr * x - a.a3 / (nr * nd) * c;
}

// Unclamped upper confidence bound.
inline double upper_bound(std::uint64_t n, unsigned r, std::uint64_t m_r, std::uint64_t c_r, double x) {
  detail::require_interval_domain(n, r);
  detail::require_positive_x(x);
  const auto b = coeffs_b(n, r);
  const double nd = static_cast<double>(n);
  const double rd = r;
  const double nr = std::pow(nd, rd);
  const double c = static_cast<double>(c_r);
  return gt_estimate(n, r, m_r) + b.b1 / nr * std::sqrt(c * x) + b.b2 / nr * x +
         std::pow((x + std::log(nd)) / nd, rd) * std::exp2(rd + 1.0) * x / 3.0;
}

inline double lower_bound(const SampleProfile& profile, unsigned r, double x) {
  detail::require_interval_domain(profile.n(), r);
  return lower_bound(profile.n(), r, profile.m_r(r), profile.c_r(r), x);
}

inline double upper_bound(const SampleProfile& profile, unsigned r, double x) {
  detail::require_interval_domain(profile.n(), r);
  return upper_bound(profile.n(), r, profile.m_r(r), profile.c_r(r), x);
}

struct IntervalReport {
  std::uint64_t n = 0;
  unsigned r = 0;
  double x = 0.0;
  double estimate = 0.0;
  double lower_raw = 0.0;
  double upper_raw = 0.0;
  double lower = 0.0;  // max(0, lower_raw)
  double upper = 0.0;  // min(1, upper_raw)
  double lower_guarantee = 0.0;  // 1 - 6 e^{-x}
  double upper_guarantee = 0.0;  // 1 - 7 e^{-x}
  double joint_guarantee = 0.0;  // 1 - 13 e^{-x}
};

inline IntervalReport interval_report(const SampleProfile& profile, unsigned r, double x) {
  IntervalReport rep;
  rep.n = profile.n();
  rep.r = r;
  rep.x = x;
  rep.lower_raw = lower_bound(profile, r, x);
  rep.upper_raw = upper_bound(profile, r, x);
  rep.estimate = gt_estimate(profile, r);
  rep.lower = std::clamp(rep.lower_raw, 0.0, 1.0);
  rep.upper = std::clamp(rep.upper_raw, 0.0, 1.0);
  rep.lower_guarantee = 1.0 - 6.0 * std::exp(-x);
  rep.upper_guarantee = 1.0 - 7.0 * std::exp(-x);
  rep.joint_guarantee = 1.0 - 13.0 * std::exp(-x);
  return rep;
}

// Deviation thresholds for theta_r around its mean at confidence level x.
// Left: P(theta - E theta <= -left) <= e^{-x}.
inline double theta_left_deviation(double v_n, double x) { return std::sqrt(2.0 * v_n * x); }

// Right: P(theta - E theta >= right) <= 2 e^{-x}.
inline double theta_right_deviation(double v_n, std::uint64_t n, unsigned r, double x) {
  const double nd = static_cast<double>(n);
  const double level = std::max(c0_constant() / 2.0, x + std::log(nd));
  return std::sqrt(2.0 * v_n * x) + std::pow(2.0 * level / nd, static_cast<double>(r)) * 2.0 * x / 3.0;
}

// |M_{n,r} - E M_{n,r}| >= this with probability at most 4 e^{-x}.
inline double m_deviation(double w_n, double x) { return std::sqrt(8.0 * w_n * x) + 2.0 * x / 3.0; }

// C_{n,r} <= E C - lower with probability at most e^{-x}; likewise
// C_{n,r} >= E C + upper.
inline double c_lower_deviation(double expected_c, double x) { return std::sqrt(8.0 * expected_c * x); }
inline double c_upper_deviation(double expected_c, double x) {
  return std::sqrt(8.0 * expected_c * x) + 4.0 * x / 3.0;
}

}  // namespace mmass
