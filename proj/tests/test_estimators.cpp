#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "mmass/estimators.hpp"

using namespace mmass;

namespace {

// Exact moments by walking all k^n ordered samples. Shares no code with the
// library beyond the mass vector.
struct RawMoments {
  double theta = 0, m = 0, m_next = 0, c = 0, gt = 0;
  std::map<std::tuple<long long, unsigned, unsigned>, double> law;  // theta scaled by 1e15
};

RawMoments raw_enumerate(const std::vector<double>& p, unsigned n, unsigned r) {
  const unsigned k = p.size();
  RawMoments out;
  std::vector<unsigned> seq(n, 0);
  double binom_nr = 1;
  for (unsigned i = 0; i < r; ++i) binom_nr = binom_nr * (n - i) / (i + 1);
  while (true) {
    std::vector<unsigned> cnt(k, 0);
    double w = 1;
    for (unsigned s : seq) {
      ++cnt[s];
      w *= p[s];
    }
    double theta = 0;
    unsigned m = 0, m1 = 0, c = 0;
    for (unsigned j = 0; j < k; ++j) {
      if (cnt[j] == 0) theta += std::pow(p[j], r);
      if (cnt[j] == r) ++m;
      if (cnt[j] == r + 1) ++m1;
      if (cnt[j] >= r) ++c;
    }
    out.theta += w * theta;
    out.m += w * m;
    out.m_next += w * m1;
    out.c += w * c;
    out.gt += w * m / binom_nr;
    out.law[{std::llround(theta * 1e15), m, c}] += w;
    unsigned i = 0;
    while (i < n && ++seq[i] == k) seq[i++] = 0;
    if (i == n) break;
  }
  return out;
}

double direct_v(const std::vector<double>& p, unsigned n, unsigned r) {
  long double s = 0;
  for (double x : p) s += std::pow((long double)x, 2.0L * r) * std::pow(1.0L - x, (long double)n);
  return double(s);
}

const std::vector<std::vector<double>> kSmallLaws{
    {1.0}, {0.5, 0.5}, {0.9, 0.1}, {0.25, 0.25, 0.25, 0.25}, {0.5, 0.3, 0.2}, {0.7, 0.1, 0.1, 0.1}, {0.4, 0.3, 0.2, 0.1}};

}  // namespace

TEST(GoodTuring, Examples) {
  EXPECT_EQ(gt_estimate(4, 1, 2), 0.5);
  EXPECT_EQ(gt_estimate(4, 2, 1), 1.0 / 6.0);
  EXPECT_EQ(gt_estimate(3, 3, 1), 1.0);
  EXPECT_EQ(gt_estimate(10, 2, 0), 0.0);
  EXPECT_THROW(gt_estimate(3, 0, 1), precondition_error);
  EXPECT_THROW(gt_estimate(3, 4, 1), precondition_error);
  // log route for huge binomials
  EXPECT_NEAR(gt_estimate(1'000'000, 5, 1000) / (1000.0 / std::exp(std::lgamma(1e6 + 1) - std::lgamma(6.0) - std::lgamma(1e6 - 4))),
              1.0, 1e-9);
}

TEST(TrueTheta, Examples) {
  const auto u = DiscreteDistribution::uniform(2);
  const std::vector<SymbolId> one{0};
  EXPECT_DOUBLE_EQ(true_theta_r(u, one, 1), 0.5);
  EXPECT_DOUBLE_EQ(true_theta_r(u, one, 2), 0.25);
}

TEST(Moments, UniformTwoExamples) {
  const auto u = DiscreteDistribution::uniform(2);
  EXPECT_NEAR(expected_theta_r(u, 1, 1), 0.5, 1e-15);
  EXPECT_NEAR(expected_theta_r(u, 2, 1), 0.25, 1e-15);
  const auto ms = moment_set(u, 2, 1);
  EXPECT_NEAR(ms.expected_theta, 0.25, 1e-15);
  EXPECT_NEAR(ms.expected_m, 1.0, 1e-15);
  EXPECT_NEAR(ms.expected_c, 1.5, 1e-15);
  EXPECT_NEAR(ms.v_n, 0.125, 1e-15);
}

TEST(Moments, PointMass) {
  const auto pm = DiscreteDistribution::finite({1.0});
  const auto ms = moment_set(pm, 5, 1);
  EXPECT_EQ(ms.expected_theta, 0.0);
  EXPECT_EQ(ms.v_n, 0.0);
  EXPECT_EQ(ms.expected_m, 0.0);
  EXPECT_NEAR(ms.expected_c, 1.0, 1e-15);
}

TEST(Moments, AgainstRawEnumeration) {
  for (const auto& p : kSmallLaws) {
    const auto d = DiscreteDistribution::finite(p);
    for (unsigned n = 1; n <= 7; ++n)
      for (unsigned r = 1; r <= std::min(n, 3u); ++r) {
        const auto raw = raw_enumerate(p, n, r);
        const auto ms = moment_set(d, n, r);
        EXPECT_NEAR(ms.expected_theta, raw.theta, 1e-12);
        EXPECT_NEAR(ms.expected_m, raw.m, 1e-12);
        EXPECT_NEAR(ms.expected_m_next, raw.m_next, 1e-12);
        EXPECT_NEAR(ms.expected_c, raw.c, 1e-12);
        EXPECT_NEAR(ms.v_n, direct_v(p, n, r), 1e-12);
      }
  }
}

TEST(ExactLaw, MatchesRawEnumeration) {
  for (const auto& p : kSmallLaws) {
    const auto d = DiscreteDistribution::finite(p);
    for (unsigned n = 1; n <= 6; ++n)
      for (unsigned r = 1; r <= std::min(n, 2u); ++r) {
        const auto raw = raw_enumerate(p, n, r);
        const auto law = enumerate_exact(d, n, r);
        EXPECT_NEAR(law.probability([](const ExactOutcome&) { return true; }), 1.0, 1e-13);
        std::map<std::tuple<long long, unsigned, unsigned>, double> got;
        for (const auto& o : law.outcomes) got[{std::llround(o.theta * 1e15), unsigned(o.m), unsigned(o.c)}] += o.prob;
        ASSERT_EQ(got.size(), raw.law.size());
        for (const auto& [key, prob] : raw.law) EXPECT_NEAR(got[key], prob, 1e-13);
      }
  }
}

TEST(ExactLaw, GuardsLargeInstances) {
  EXPECT_THROW(enumerate_exact(DiscreteDistribution::uniform(50), 100, 1), precondition_error);
}

TEST(Moments, BiasSandwich) {
  // 0 <= E[GT] - E[theta] <= r E[C] / C(n, r+1)
  for (const auto& p : kSmallLaws) {
    const auto d = DiscreteDistribution::finite(p);
    for (unsigned n = 2; n <= 7; ++n)
      for (unsigned r = 1; r < n; ++r) {
        const auto raw = raw_enumerate(p, n, r);
        const double bias = raw.gt - raw.theta;
        double b = 1;
        for (unsigned i = 0; i <= r; ++i) b = b * (n - i) / (i + 1);
        EXPECT_GE(bias, -1e-13);
        EXPECT_LE(bias, r * moment_set(d, n, r).expected_c / b + 1e-13);
      }
  }
}

TEST(Moments, VarianceProxyBoundedByC) {
  // v_n <= E[C_{n,r}] / C(n, 2r) whenever n >= 2r
  const std::vector<DiscreteDistribution> dists{
      DiscreteDistribution::uniform(30), DiscreteDistribution::geometric(0.9), DiscreteDistribution::zipf(0.5),
      DiscreteDistribution::lemma2(0.5, 1.0), DiscreteDistribution::two_point(0.01)};
  for (const auto& d : dists)
    for (std::uint64_t n : {4u, 20u, 200u, 5000u})
      for (unsigned r : {1u, 2u}) {
        const auto ms = moment_set(d, n, r);
        EXPECT_LE(ms.v_n, ms.expected_c / binom(n, 2 * r) * (1 + 1e-12)) << d.describe() << " " << n << " " << r;
      }
}

TEST(Moments, QuadratureIdentityForC) {
  for (const auto& p : kSmallLaws) {
    const auto d = DiscreteDistribution::finite(p);
    for (unsigned n : {1u, 3u, 10u, 50u})
      for (unsigned k = 1; k <= std::min(n, 3u); ++k)
        EXPECT_NEAR(expected_c_by_quadrature(d, n, k), moment_set(d, n, k).expected_c, 1e-8);
  }
  const auto u5 = DiscreteDistribution::uniform(5);
  EXPECT_NEAR(expected_c_by_quadrature(u5, 40, 2), moment_set(u5, 40, 2).expected_c, 1e-8);
}

TEST(Moments, InfiniteSupportAgainstBlockSums) {
  // lemma2 moments by summing whole blocks in long double
  const auto d = DiscreteDistribution::lemma2(0.5, 1.0);
  const auto& p = d.lemma2_params();
  for (std::uint64_t n : {10u, 1000u, 100000u})
    for (unsigned r : {1u, 2u}) {
      long double theta = std::pow((long double)p.omega, r) * std::pow(1.0L - p.omega, (long double)n);
      for (unsigned k = 0; k < 4000; ++k) {
        const long double m = (1.0L - p.omega) * p.c * std::pow(2.0L, -(long double)k / p.alpha);
        theta += (long double)p.b * std::pow(2.0L, (long double)k) * std::pow(m, (long double)r) *
                 std::pow(1.0L - m, (long double)n);
      }
      EXPECT_NEAR(moment_set(d, n, r).expected_theta / double(theta), 1.0, 1e-10) << n << " " << r;
    }
}
