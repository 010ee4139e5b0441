#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

#include "mmass/errors.hpp"
#include "mmass/intervals.hpp"
#include "mmass/profile.hpp"

namespace mmass {

enum class RatioStatus { finite, infinite, undefined };

inline std::string_view to_string(RatioStatus s) {
  switch (s) {
    case RatioStatus::finite: return "finite";
    case RatioStatus::infinite: return "infinite";
    case RatioStatus::undefined: return "undefined";
  }
  return "undefined";
}

struct MatchRatio {
  RatioStatus status = RatioStatus::undefined;
  double value = std::numeric_limits<double>::quiet_NaN();  // meaningful only when finite
};

// theta_1 / theta_2 for any pair of (estimated or true) values.
inline MatchRatio ratio_of(double theta1, double theta2) {
  if (theta2 > 0.0) return {RatioStatus::finite, theta1 / theta2};
  if (theta1 > 0.0) return {RatioStatus::infinite, std::numeric_limits<double>::infinity()};
  return {};
}

// Estimated match ratio M_1 (n-1) / (2 M_2).
inline MatchRatio t_hat(const SampleProfile& profile) {
  require(profile.n() >= 2, "t_hat: requires n >= 2");
  const double m1 = static_cast<double>(profile.m_r(1));
  const double m2 = static_cast<double>(profile.m_r(2));
  if (m2 > 0.0) return {RatioStatus::finite, m1 * static_cast<double>(profile.n() - 1) / (2.0 * m2)};
  return ratio_of(m1, 0.0);
}

struct MatchReport {
  MatchRatio t_hat;
  double x = 0.0;
  double low = 0.0;
  double high = 0.0;         // +inf when the r = 2 lower bound is not positive
  bool high_finite = true;
  double guarantee = 0.0;    // 1 - 26 e^{-x}
  double lower_1 = 0.0, upper_1 = 0.0, lower_2 = 0.0, upper_2 = 0.0;  // unclamped component bounds
};

// Interval from the r = 1 and r = 2 counts (M_{n,1}, C_{n,1}, M_{n,2}, C_{n,2}).
inline MatchReport match_interval(std::uint64_t n, std::uint64_t m1, std::uint64_t c1, std::uint64_t m2,
                                  std::uint64_t c2, double x) {
  require(n > 4, "match_interval: requires n > 4");
  MatchReport rep;
  rep.x = x;
  rep.t_hat = m2 > 0 ? MatchRatio{RatioStatus::finite,
                                  static_cast<double>(m1) * static_cast<double>(n - 1) / (2.0 * static_cast<double>(m2))}
                     : ratio_of(static_cast<double>(m1), 0.0);
  rep.lower_1 = lower_bound(n, 1, m1, c1, x);
  rep.upper_1 = upper_bound(n, 1, m1, c1, x);
  rep.lower_2 = lower_bound(n, 2, m2, c2, x);
  rep.upper_2 = upper_bound(n, 2, m2, c2, x);

  const double u2 = std::min(rep.upper_2, 1.0);
  rep.low = u2 > 0.0 ? std::max(0.0, rep.lower_1) / u2 : 0.0;
  if (rep.lower_2 > 0.0) {
    rep.high = std::min(rep.upper_1, 1.0) / rep.lower_2;
  } else {
    rep.high = std::numeric_limits<double>::infinity();
    rep.high_finite = false;
  }
  rep.guarantee = 1.0 - 26.0 * std::exp(-x);
  return rep;
}

inline MatchReport match_interval(const SampleProfile& profile, double x) {
  require(profile.n() > 4, "match_interval: requires n > 4");
  return match_interval(profile.n(), profile.m_r(1), profile.c_r(1), profile.m_r(2), profile.c_r(2), x);
}

inline bool interval_contains(const MatchReport& rep, const MatchRatio& t) {
  switch (t.status) {
    case RatioStatus::finite: return rep.low <= t.value && t.value <= rep.high;
    case RatioStatus::infinite: return !rep.high_finite;
    case RatioStatus::undefined: return false;
  }
  return false;
}

}  // namespace mmass
