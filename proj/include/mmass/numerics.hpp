#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mmass/errors.hpp"

namespace mmass {

// std::lgamma writes the global signgam on glibc; the reentrant variant does not.
inline double log_gamma(double z) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(z, &sign);
#else
  return std::lgamma(z);
#endif
}

inline double log_factorial(std::uint64_t k) { return log_gamma(static_cast<double>(k) + 1.0); }

// log C(n, k) through log-gamma differences; -inf when k > n.
inline double log_binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

inline double binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  return std::exp(log_binom(n, k));
}

// Exact C(n, k) when it fits in 64 bits.
inline std::optional<std::uint64_t> exact_binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;  // exact: acc holds C(n-k+i, i)
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

// Stirling sandwich: lower(z) <= log Gamma(z) <= lower(z) + 1/(12 z) for z > 0.
inline double stirling_lower(double z) {
  return z * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi / z);
}
inline double stirling_upper(double z) { return stirling_lower(z) + 1.0 / (12.0 * z); }

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Root of a continuous f with a sign change on [lo, hi], bisected until the
// bracket is narrower than tol.
template <class F>
double bisect_root(F&& f, double lo, double hi, double tol = 1e-14) {
  double flo = f(lo);
  require(flo * f(hi) <= 0.0, "bisect_root: no sign change on bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section search for the maximiser of a unimodal f on [lo, hi].
template <class F>
double golden_section_argmax(F&& f, double lo, double hi, double tol = 1e-8) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// P(Binomial(n, p) >= r), evaluated without cancellation in the small-p regime
// where the answer is tiny (upward summation from the r-th term).
class BinomialUpperTail {
 public:
  BinomialUpperTail(std::uint64_t n, std::uint64_t r) : n_(n), r_(r), log_binom_nr_(log_binom(n, r)) {}

  double operator()(double p) const {
    if (r_ == 0) return 1.0;
    if (r_ > n_ || p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const double nd = static_cast<double>(n_);
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    if (static_cast<double>(r_) > nd * p) {
      double term = std::exp(log_binom_nr_ + static_cast<double>(r_) * log_p +
                             static_cast<double>(n_ - r_) * log_q);
      double sum = term;
      const double odds = p / (1.0 - p);
      for (std::uint64_t i = r_; i < n_ && term > 1e-17 * sum; ++i) {
        term *= static_cast<double>(n_ - i) / static_cast<double>(i + 1) * odds;
        sum += term;
      }
      return std::min(sum, 1.0);
    }
    double lower = 0.0;
    for (std::uint64_t i = 0; i < r_; ++i)
      lower += std::exp(log_binom(n_, i) + static_cast<double>(i) * log_p +
                        static_cast<double>(n_ - i) * log_q);
    return std::clamp(1.0 - lower, 0.0, 1.0);
  }

 private:
  std::uint64_t n_;
  std::uint64_t r_;
  double log_binom_nr_;
};

// Binomial(n, p) mass at r, with the p in {0, 1} corners handled exactly.
inline double binomial_pmf(std::uint64_t n, std::uint64_t r, double p, double log_binom_nr) {
  if (r > n) return 0.0;
  if (p <= 0.0) return r == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return r == n ? 1.0 : 0.0;
  return std::exp(log_binom_nr + static_cast<double>(r) * std::log(p) +
                  static_cast<double>(n - r) * std::log1p(-p));
}

// Adaptive 15-point Gauss-Kronrod integral of f over [a, b]; throws when the
// error estimate misses the absolute tolerance.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
  if (b <= a) return 0.0;
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 30, 1e-13, &error);
  if (!(error <= abs_tol)) throw std::runtime_error("integrate: tolerance not reached");
  return value;
}

}  // namespace mmass
