#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "mmass/distributions.hpp"
#include "mmass/errors.hpp"
#include "mmass/numerics.hpp"
#include "mmass/parallel.hpp"
#include "mmass/profile.hpp"
#include "mmass/rng.hpp"

namespace mmass {

// Pitman-Yor (discount alpha, strength d); alpha = 0 is the Dirichlet process.
struct PyParams {
  double alpha = 0.0;
  double d = 1.0;

  void validate() const {
    require(alpha >= 0.0 && alpha < 1.0, "Pitman-Yor alpha must lie in [0,1)");
    require(d > -alpha, "Pitman-Yor strength must satisfy d > -alpha");
  }
};

// Table sizes of a Chinese restaurant process run with n customers.
inline std::vector<std::uint64_t> crp_tables(const PyParams& params, std::uint64_t n, Rng& rng) {
  params.validate();
  std::vector<std::uint64_t> tables;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(tables.size());
    const double total = params.d + static_cast<double>(i);
    const double u = uniform01(rng) * total;
    const double fresh = params.d + params.alpha * k;
    if (i == 0 || u < fresh) {
      tables.push_back(1);
      continue;
    }
    // join table j with weight N_j - alpha
    double acc = fresh;
    std::size_t j = 0;
    for (; j + 1 < tables.size(); ++j) {
      acc += static_cast<double>(tables[j]) - params.alpha;
      if (u < acc) break;
    }
    ++tables[j];
  }
  return tables;
}

inline SampleProfile crp_sample(const PyParams& params, std::uint64_t n, std::uint64_t seed) {
  require(n >= 1, "crp_sample: n must be >= 1");
  Rng rng(seed);
  const auto tables = crp_tables(params, n, rng);
  return SampleProfile::from_symbol_counts(tables);
}

struct PosteriorDraw {
  double w0 = 0.0;
  double log_w0 = 0.0;
  double z = 1.0;                 // sum_j Q_j^r over the generated sticks
  double truncation_error = 0.0;  // bound on the dropped part of z
  double log_theta = 0.0;         // r log w0 + log z
  double theta = 0.0;
  std::uint64_t sticks = 0;
};

// One draw of theta_r | X_n: W0^r * sum_j Q_j^r with W0 ~ Beta(d + alpha K,
// n - alpha K) and Q a stick-breaking Pitman-Yor(alpha, d + alpha K) draw.
inline PosteriorDraw posterior_theta_draw(const SampleProfile& profile, const PyParams& params, unsigned r, Rng& rng,
                                          double trunc_tol = 1e-10) {
  params.validate();
  require(r >= 1, "r must be >= 1");
  require(trunc_tol > 0.0 && trunc_tol < 1.0, "trunc_tol must lie in (0,1)");
  const double k = static_cast<double>(profile.distinct());
  const double nd = static_cast<double>(profile.n());
  const double a = params.d + params.alpha * k;
  const double b = nd - params.alpha * k;
  require(a > 0.0 && b > 0.0, "posterior Beta parameters must be positive");

  PosteriorDraw out;
  out.log_w0 = log_beta_variate(a, b, rng);
  out.w0 = std::exp(out.log_w0);
  if (r > 1) {
    const double rd = r;
    const double log_tol = std::log(trunc_tol);
    double log_rho = 0.0;  // log residual stick mass
    CompensatedSum z;
    constexpr std::uint64_t kMaxSticks = 100'000'000;
    for (std::uint64_t i = 1; rd * log_rho > log_tol; ++i) {
      require(i <= kMaxSticks, "posterior_theta_draw: stick-breaking did not reach the tolerance");
      const double lx = log_gamma_variate(1.0 - params.alpha, rng);
      const double ly = log_gamma_variate(a + static_cast<double>(i) * params.alpha, rng);
      const double m = std::max(lx, ly);
      const double lse = m + std::log(std::exp(lx - m) + std::exp(ly - m));
      z.add(std::exp(rd * (lx - lse + log_rho)));
      log_rho += ly - lse;
      out.sticks = i;
    }
    out.z = z.value();
    out.truncation_error = std::exp(rd * log_rho);
  }
  out.log_theta = static_cast<double>(r) * out.log_w0 + std::log(out.z);
  out.theta = std::exp(out.log_theta);
  return out;
}

struct BetaBand {
  double numeric_sup = 0.0;
  double analytic_bound = 0.0;
  double argmax_t = 0.0;
};

// sup_t P(t d1 <= X <= t d2) for X ~ Beta(a, b), next to its closed-form
// upper bound (d2/d1 - 1) sqrt(a(a+b-1) / (2 pi (b-1))) e^{1/(12(a+b-1))}.
inline BetaBand beta_band_bound(double a, double b, double delta1, double delta2) {
  require(a > 0.0 && std::isfinite(a), "beta_band_bound: a must be positive");
  require(b > 1.0 && std::isfinite(b), "beta_band_bound: b must exceed 1");
  require(delta1 > 0.0 && delta2 >= delta1 && std::isfinite(delta2), "beta_band_bound: need 0 < delta1 <= delta2");
  BetaBand out;
  if (delta1 == delta2) return out;

  const double s = a + b - 1.0;
  out.analytic_bound = (delta2 / delta1 - 1.0) * std::sqrt(a * s / (2.0 * std::numbers::pi * (b - 1.0))) *
                       std::exp(1.0 / (12.0 * s));

  // scan log t, where the band has constant width, then refine
  const auto band = [&](double log_t) {
    const double t = std::exp(log_t);
    const double hi = std::min(t * delta2, 1.0);
    const double lo = std::min(t * delta1, 1.0);
    if (hi <= lo) return 0.0;
    return boost::math::ibeta(a, b, hi) - boost::math::ibeta(a, b, lo);
  };
  const double top = -std::log(delta1);
  const double bottom = -700.0;
  constexpr int kGrid = 4000;
  const double step = (top - bottom) / kGrid;
  int best = kGrid;
  double best_val = band(top);
  for (int i = 0; i < kGrid; ++i) {
    const double v = band(bottom + i * step);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = bottom + std::max(best - 1, 0) * step;
  const double hi = std::min(bottom + (best + 1) * step, top);
  const double arg = golden_section_argmax(band, lo, hi, 1e-8);
  const double refined = band(arg);
  if (refined >= best_val) {
    out.numeric_sup = refined;
    out.argmax_t = std::exp(arg);
  } else {
    out.numeric_sup = best_val;
    out.argmax_t = std::exp(bottom + best * step);
  }
  return out;
}

struct BayesRiskReport {
  unsigned r = 0;
  double d = 0.0;
  double epsilon = 0.0;
  std::uint64_t n = 0;
  std::uint64_t reps = 0;
  std::uint64_t draws = 0;
  double mean_failure = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;  // 1 - sqrt(2d) (eps/r) / (1 - eps)
  bool pass = false;
};

inline double bayes_risk_bound(double d, double epsilon, unsigned r) {
  return 1.0 - std::sqrt(2.0 * d) * (epsilon / r) / (1.0 - epsilon);
}

// Largest fraction of sorted log-values inside any closed window of the
// given width.
inline double max_window_fraction(const std::vector<double>& sorted_logs, double width) {
  std::size_t best = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < sorted_logs.size(); ++hi) {
    while (sorted_logs[hi] - sorted_logs[lo] > width) ++lo;
    best = std::max(best, hi - lo + 1);
  }
  return sorted_logs.empty() ? 0.0 : static_cast<double>(best) / static_cast<double>(sorted_logs.size());
}

// Bayes risk of the best constant prediction under a Dirichlet-process
// prior (alpha = 0). Per replicate: X_n from the CRP, then `draws` posterior
// draws of theta_r; the best t is found by scanning all windows
// |t / theta - 1| <= eps, which in log theta is a window of fixed width.
inline BayesRiskReport bayes_risk_demo(unsigned r, double d, double epsilon, std::uint64_t n, std::uint64_t reps,
                                       std::uint64_t seed, std::uint64_t draws = 2000, unsigned threads = 0) {
  require(r >= 1, "r must be >= 1");
  require(d > 0.0 && d < 1.0, "d must lie in (0,1)");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1)");
  require(n >= 2, "n must be >= 2");
  require(reps >= 1 && draws >= 1, "reps and draws must be positive");
  const PyParams prior{0.0, d};
  const double width = std::log1p(epsilon) - std::log1p(-epsilon);

  std::vector<double> failure(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const auto profile = SampleProfile::from_symbol_counts(crp_tables(prior, n, rng));
    std::vector<double> logs(draws);
    for (auto& v : logs) v = posterior_theta_draw(profile, prior, r, rng).log_theta;
    std::sort(logs.begin(), logs.end());
    failure[i] = 1.0 - max_window_fraction(logs, width);
  });

  BayesRiskReport rep;
  rep.r = r;
  rep.d = d;
  rep.epsilon = epsilon;
  rep.n = n;
  rep.reps = reps;
  rep.draws = draws;
  CompensatedSum s, s2;
  for (const double f : failure) {
    s.add(f);
    s2.add(f * f);
  }
  const double rd = static_cast<double>(reps);
  rep.mean_failure = s.value() / rd;
  const double var = reps > 1 ? std::max(0.0, (s2.value() - rd * rep.mean_failure * rep.mean_failure) / (rd - 1.0)) : 0.0;
  rep.stderr_ = std::sqrt(var / rd);
  rep.bound = bayes_risk_bound(d, epsilon, r);
  rep.pass = rep.mean_failure >= rep.bound - 3.0 * rep.stderr_;
  return rep;
}

struct LeCamReport {
  unsigned r = 0;
  double epsilon = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  std::uint64_t n = 0;
  std::uint64_t reps = 0;
  double estimate_on_e = 0.0;  // prediction used when no rare atom is seen
  double risk1 = 0.0;          // P_1(loss >= eps)
  double risk2 = 0.0;
  double max_risk = 0.0;
  double mean_risk = 0.0;
  double stderr_ = 0.0;  // of max_risk
  double bound = 0.0;    // (1 - n (omega2 - omega1)) / 2 - n omega2 / 2
  bool pass = false;
};

// Two-point lower bound with P_j = (1 - omega_j) delta_heart + omega_j delta_diamond.
// The estimator sees only whether, and how often, the diamond appears; when it
// does not, it predicts one of omega_1^r, omega_2^r, whichever gives the
// smaller worst-case risk.
inline LeCamReport lecam_demo(unsigned r, double epsilon, double omega2, std::uint64_t n, std::uint64_t reps,
                              std::uint64_t seed) {
  require(n >= 1 && reps >= 1, "n and reps must be positive");
  const double omega1 = DiscreteDistribution::lecam_companion(omega2, epsilon, r);
  const double rd = r;
  const double omega[2] = {omega1, omega2};

  // diamond counts per replicate under P_1 and P_2
  std::vector<std::uint64_t> counts[2];
  for (int j = 0; j < 2; ++j) {
    counts[j].resize(reps);
    std::binomial_distribution<std::uint64_t> diamonds(n, omega[j]);
    for (std::uint64_t i = 0; i < reps; ++i) {
      Rng rng(derive_seed(seed, i, static_cast<std::uint64_t>(j)));
      counts[j][i] = diamonds(rng);
    }
  }

  const auto loss_fails = [&](double t, double theta) {
    // theta = 0 happens when both atoms are seen; every prediction is then
    // scored as correct
    if (theta == 0.0) return false;
    return std::abs(t / theta - 1.0) >= epsilon;
  };
  const auto risks_for = [&](double t_on_e) {
    std::pair<double, double> out{0.0, 0.0};
    double* slot[2] = {&out.first, &out.second};
    for (int j = 0; j < 2; ++j) {
      std::uint64_t fails = 0;
      for (const auto c : counts[j]) {
        double theta, t;
        if (c == 0) {
          theta = std::pow(omega[j], rd);
          t = t_on_e;
        } else if (c == n) {
          theta = std::pow(1.0 - omega[j], rd);
          t = std::pow(1.0 - omega2, rd);
        } else {
          theta = 0.0;
          t = 0.0;
        }
        if (loss_fails(t, theta)) ++fails;
      }
      *slot[j] = static_cast<double>(fails) / static_cast<double>(reps);
    }
    return out;
  };

  LeCamReport rep;
  rep.r = r;
  rep.epsilon = epsilon;
  rep.omega1 = omega1;
  rep.omega2 = omega2;
  rep.n = n;
  rep.reps = reps;
  const double candidates[2] = {std::pow(omega1, rd), std::pow(omega2, rd)};
  rep.max_risk = 2.0;
  for (const double t : candidates) {
    const auto [r1, r2] = risks_for(t);
    if (std::max(r1, r2) < rep.max_risk) {
      rep.max_risk = std::max(r1, r2);
      rep.risk1 = r1;
      rep.risk2 = r2;
      rep.estimate_on_e = t;
    }
  }
  rep.mean_risk = 0.5 * (rep.risk1 + rep.risk2);
  const double p = rep.max_risk;
  rep.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
  const double nd = static_cast<double>(n);
  rep.bound = 0.5 * (1.0 - nd * (omega2 - omega1)) - nd * omega2 / 2.0;
  rep.pass = rep.max_risk >= rep.bound - 3.0 * rep.stderr_;
  return rep;
}

}  // namespace mmass
