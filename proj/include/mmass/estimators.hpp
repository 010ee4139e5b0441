#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "mmass/distributions.hpp"
#include "mmass/errors.hpp"
#include "mmass/numerics.hpp"
#include "mmass/profile.hpp"

namespace mmass {

// Good-Turing estimate of theta_r: M_{n,r} / C(n, r).
inline double gt_estimate(std::uint64_t n, unsigned r, std::uint64_t m_r) {
  require(r >= 1, "gt_estimate: r must be >= 1");
  require(r <= n, "gt_estimate: r must not exceed n");
  if (m_r == 0) return 0.0;
  // a single correctly rounded division while C(n, r) is exact in a double
  if (const auto b = exact_binom(n, r); b && *b <= (std::uint64_t{1} << 53))
    return static_cast<double>(m_r) / static_cast<double>(*b);
  return std::exp(std::log(static_cast<double>(m_r)) - log_binom(n, r));
}

inline double gt_estimate(const SampleProfile& profile, unsigned r) {
  require(r >= 1, "gt_estimate: r must be >= 1");
  return gt_estimate(profile.n(), r, profile.m_r(r));
}

// theta_r(P; X_n) for a sample whose distinct ids are `observed` (sorted).
inline double true_theta_r(const DiscreteDistribution& dist, std::span<const SymbolId> observed, unsigned r) {
  return dist.unseen_power_sum(observed, r);
}

struct MomentSet {
  std::uint64_t n = 0;
  unsigned r = 0;
  double expected_theta = 0.0;   // sum p^r (1-p)^n
  double v_n = 0.0;              // sum p^{2r} (1-p)^n
  double expected_m = 0.0;       // E M_{n,r}
  double expected_m_next = 0.0;  // E M_{n,r+1}
  double expected_c = 0.0;       // E C_{n,r}
  double w_n = 0.0;              // min(max(r E M_{n,r}, (r+1) E M_{n,r+1}), E C_{n,r})
};

namespace detail {

constexpr double kSeriesRelTol = 1e-14;

inline bool remainder_negligible(double bound, double sum) {
  return bound == 0.0 || bound <= kSeriesRelTol * sum;
}

}  // namespace detail

inline MomentSet moment_set(const DiscreteDistribution& dist, std::uint64_t n, unsigned r) {
  require(r >= 1, "moment_set: r must be >= 1");
  require(r <= n, "moment_set: r must not exceed n");
  MomentSet out;
  out.n = n;
  out.r = r;
  const double nd = static_cast<double>(n);
  const double rd = r;
  const double lb_r = log_binom(n, r);
  const double lb_r1 = log_binom(n, r + 1);
  const BinomialUpperTail at_least_r(n, r);
  CompensatedSum theta, v, m, m_next, c;

  dist.visit_atoms([&](double p, double mult, double tail, double pmax) {
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double lp = mult == 1.0 ? 0.0 : std::log(mult);
    theta.add(std::exp(lp + rd * log_p + nd * log_q));
    v.add(std::exp(lp + 2.0 * rd * log_p + nd * log_q));
    m.add(mult * binomial_pmf(n, r, p, lb_r));
    if (r + 1 <= n) m_next.add(mult * binomial_pmf(n, r + 1, p, lb_r1));
    c.add(mult * at_least_r(p));

    // Remainder bounds: each term is at most (a binomial factor times) p^k,
    // and sum_{rest} p^k <= tail * pmax^{k-1}.
    if (tail <= 0.0) return true;
    const double t_r = tail * std::pow(pmax, rd - 1.0);
    const double t_2r = tail * std::pow(pmax, 2.0 * rd - 1.0);
    const double bin_r = std::exp(lb_r);
    const double bin_r1 = r + 1 <= n ? std::exp(lb_r1) * tail * std::pow(pmax, rd) : 0.0;
    const bool done = detail::remainder_negligible(t_r, theta.value()) &&
                      detail::remainder_negligible(t_2r, v.value()) &&
                      detail::remainder_negligible(bin_r * t_r, m.value()) &&
                      detail::remainder_negligible(bin_r1, m_next.value()) &&
                      detail::remainder_negligible(bin_r * t_r, c.value());
    return !done;
  });

  out.expected_theta = theta.value();
  out.v_n = v.value();
  out.expected_m = m.value();
  out.expected_m_next = m_next.value();
  out.expected_c = c.value();
  out.w_n = std::min(std::max(rd * out.expected_m, (rd + 1.0) * out.expected_m_next), out.expected_c);
  return out;
}

inline double expected_theta_r(const DiscreteDistribution& dist, std::uint64_t n, unsigned r) {
  require(r >= 1, "expected_theta_r: r must be >= 1");
  const double nd = static_cast<double>(n);
  const double rd = r;
  CompensatedSum theta;
  dist.visit_atoms([&](double p, double mult, double tail, double pmax) {
    theta.add(mult * std::exp(rd * std::log(p) + nd * std::log1p(-p)));
    return !detail::remainder_negligible(tail * std::pow(pmax, rd - 1.0), theta.value());
  });
  return theta.value();
}

// E C_{n,k} = k C(n,k) int_0^1 Fbar(x) x^{k-1} (1-x)^{n-k} dx for finite
// supports. Fbar is a step function, so the integral is split at the atom
// masses and each piece integrates the Beta(k, n-k+1) density.
inline double expected_c_by_quadrature(const DiscreteDistribution& dist, std::uint64_t n, unsigned k) {
  require(k >= 1 && k <= n, "expected_c_by_quadrature: need 1 <= k <= n");
  std::vector<double> cuts = dist.finite_masses();
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double log_norm = std::log(static_cast<double>(k)) + log_binom(n, k);
  const double a = k - 1.0;
  const double b = static_cast<double>(n - k);
  const auto density = [&](double x) {
    if (x <= 0.0) return a == 0.0 ? std::exp(log_norm) : 0.0;
    if (x >= 1.0) return b == 0.0 ? std::exp(log_norm) : 0.0;
    return std::exp(log_norm + a * std::log(x) + b * std::log1p(-x));
  };

  CompensatedSum total;
  double lo = 0.0;
  std::size_t above = dist.finite_masses().size();  // atoms with mass > x on (lo, cut)
  for (const double cut : cuts) {
    total.add(static_cast<double>(above) * integrate(density, lo, cut));
    for (const double p : dist.finite_masses())
      if (p == cut) --above;
    lo = cut;
  }
  return total.value();
}

// One point of the exact joint law of (theta_r, M_{n,r}, C_{n,r}).
struct ExactOutcome {
  double theta;
  std::uint64_t m;
  std::uint64_t c;
  double prob;
};

struct ExactLaw {
  std::uint64_t n = 0;
  unsigned r = 0;
  std::vector<ExactOutcome> outcomes;

  template <class F>
  double expectation(F&& f) const {
    CompensatedSum s;
    for (const auto& o : outcomes) s.add(o.prob * f(o));
    return s.value();
  }
  template <class Pred>
  double probability(Pred&& pred) const {
    CompensatedSum s;
    for (const auto& o : outcomes)
      if (pred(o)) s.add(o.prob);
    return s.value();
  }
};

constexpr std::uint64_t kMaxCompositions = 1'000'000;

// Exact law by walking every frequency vector (y_1..y_k), sum y_j = n,
// weighted by its multinomial probability.
inline ExactLaw enumerate_exact(const DiscreteDistribution& dist, std::uint64_t n, unsigned r) {
  require(r >= 1, "enumerate_exact: r must be >= 1");
  const auto& p = dist.finite_masses();
  const std::size_t k = p.size();
  const auto count = exact_binom(n + k - 1, k - 1);
  require(count && *count <= kMaxCompositions, "enumerate_exact: instance too large");

  std::vector<double> log_p(k), pow_r(k);
  for (std::size_t j = 0; j < k; ++j) {
    log_p[j] = std::log(p[j]);
    pow_r[j] = std::pow(p[j], static_cast<double>(r));
  }
  const double log_n_fact = log_factorial(n);

  std::map<std::tuple<double, std::uint64_t, std::uint64_t>, CompensatedSum> law;
  std::vector<std::uint64_t> y(k, 0);
  // recursive fill of y[j..k) with `left` items remaining
  const auto visit = [&](auto&& self, std::size_t j, std::uint64_t left, double log_w) -> void {
    if (j + 1 == k) {
      y[j] = left;
      const double lw = log_w - log_factorial(left) + static_cast<double>(left) * log_p[j];
      CompensatedSum theta;
      std::uint64_t m = 0, c = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (y[i] == 0) theta.add(pow_r[i]);
        if (y[i] == r) ++m;
        if (y[i] >= r) ++c;
      }
      law[{theta.value(), m, c}].add(std::exp(log_n_fact + lw));
      return;
    }
    for (std::uint64_t v = 0; v <= left; ++v) {
      y[j] = v;
      self(self, j + 1, left - v, log_w - log_factorial(v) + static_cast<double>(v) * log_p[j]);
    }
  };
  visit(visit, 0, n, 0.0);

  ExactLaw out;
  out.n = n;
  out.r = r;
  out.outcomes.reserve(law.size());
  for (const auto& [key, prob] : law)
    out.outcomes.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), prob.value()});
  return out;
}

}  // namespace mmass
