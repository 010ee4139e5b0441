#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "mmass/intervals.hpp"

using namespace mmass;

namespace {

double choose(double n, unsigned k) {
  double b = 1;
  for (unsigned i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return b;
}

SampleProfile five_sample() {
  // two singletons and one symbol seen three times
  return SampleProfile::from_sample(std::vector<std::string>{"a", "b", "c", "c", "c"});
}

}  // namespace

TEST(C0, SolvesDefiningEquation) {
  const double c0 = c0_constant();
  EXPECT_NEAR(std::log(c0) / c0, -0.5, 1e-10);
  EXPECT_GT(c0, 0.70);
  EXPECT_LT(c0, 0.71);
}

TEST(Coefficients, SmallWorkedExample) {
  const auto a = coeffs_a(5, 1);
  const double a1 = std::sqrt(2.0) * 5 / std::sqrt(choose(5, 2)) + 2 * std::sqrt(2.0) * 5 / choose(5, 1);
  const double a2 = 4.0 * 5 / std::sqrt(choose(5, 2)) + 26.0 / 3.0 * 5 / choose(5, 1) + 16.0 * 5 / choose(5, 2);
  EXPECT_NEAR(a.a1, 5.06450, 1e-5);
  EXPECT_NEAR(a.a1, a1, 1e-13);
  EXPECT_NEAR(a.a2, a2, 1e-12);
  EXPECT_NEAR(a.a3, 5.0, 1e-13);
  const auto b = coeffs_b(5, 1);
  EXPECT_DOUBLE_EQ(b.b1, a.a1);
  EXPECT_NEAR(b.b2, a2 - 16.0 * 5 / choose(5, 2), 1e-12);
}

TEST(Coefficients, LimitsForROne) {
  const auto l = coeff_limits(1);
  EXPECT_NEAR(l.a1, 2 * std::sqrt(2.0) + 2, 1e-12);
  EXPECT_NEAR(l.a1, 4.82843, 1e-5);
  EXPECT_NEAR(l.a2, 26.0 / 3 + 4 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(l.a2, 14.323521, 1e-6);
  EXPECT_NEAR(l.a3, 4.0, 1e-15);
  EXPECT_DOUBLE_EQ(l.b2, l.a2);
}

TEST(Coefficients, ConvergeToLimits) {
  for (unsigned r : {1u, 2u, 3u}) {
    const auto l = coeff_limits(r);
    const auto a = coeffs_a(100000, r);
    EXPECT_NEAR(a.a1 / l.a1, 1.0, 0.01);
    EXPECT_NEAR(a.a2 / l.a2, 1.0, 0.01);
    EXPECT_NEAR(a.a3 / l.a3, 1.0, 0.01);
    EXPECT_NEAR(coeffs_b(100000, r).b2 / l.b2, 1.0, 0.01);
    // a1 approaches its limit from above once n >= 10r
    double prev = coeffs_a(10 * r, r).a1;
    for (std::uint64_t n = 10 * r + 1; n < 2000; n += 7) {
      const double cur = coeffs_a(n, r).a1;
      EXPECT_LE(cur, prev * (1 + 1e-12)) << r << " " << n;
      EXPECT_GE(cur, l.a1 * (1 - 1e-12));
      prev = cur;
    }
  }
}

TEST(Bounds, LowerWorkedExample) {
  const auto p = five_sample();
  ASSERT_EQ(p.m_r(1), 2u);
  ASSERT_EQ(p.c_r(1), 3u);
  const auto a = coeffs_a(5, 1);
  const double expected = 2.0 / 5 - a.a1 / 5 * std::sqrt(3.0) - a.a2 / 5 - a.a3 / 25 * 3;
  EXPECT_NEAR(lower_bound(p, 1, 1.0), expected, 1e-13);
  EXPECT_NEAR(lower_bound(p, 1, 1.0), -6.553, 1e-3);
  const auto rep = interval_report(p, 1, 1.0);
  EXPECT_EQ(rep.lower, 0.0);
  EXPECT_EQ(rep.upper, 1.0);
  EXPECT_DOUBLE_EQ(rep.estimate, 0.4);
}

TEST(Bounds, UpperWorkedExample) {
  const auto p = five_sample();
  const auto b = coeffs_b(5, 1);
  const double x = 2.0;
  const double expected = 0.4 + b.b1 / 5 * std::sqrt(3 * x) + b.b2 / 5 * x + (x + std::log(5.0)) / 5 * 4 * x / 3;
  EXPECT_NEAR(upper_bound(p, 1, x), expected, 1e-13);
}

TEST(Bounds, DomainChecks) {
  const auto p = five_sample();
  EXPECT_THROW(lower_bound(p, 3, 1.0), precondition_error);
  EXPECT_THROW(upper_bound(4, 2, 0, 1, 1.0), precondition_error);
  EXPECT_THROW(lower_bound(p, 1, 0.0), precondition_error);
  EXPECT_THROW(upper_bound(p, 1, -1.0), precondition_error);
  EXPECT_THROW(upper_bound(p, 1, INFINITY), precondition_error);
  try {
    lower_bound(4, 2, 0, 0, 1.0);
    FAIL();
  } catch (const precondition_error& e) {
    EXPECT_NE(std::string(e.what()).find("requires n > 2r"), std::string::npos);
  }
}

TEST(Bounds, MonotoneInXAndBracketEstimate) {
  const std::uint64_t n = 2000;
  for (unsigned r : {1u, 2u, 3u})
    for (std::uint64_t m : {0u, 5u, 80u}) {
      const std::uint64_t c = m + 40;
      double prev_l = INFINITY, prev_u = -INFINITY;
      for (double x = 0.05; x < 20; x *= 1.5) {
        const double lo = lower_bound(n, r, m, c, x), hi = upper_bound(n, r, m, c, x);
        const double est = gt_estimate(n, r, m);
        EXPECT_LE(lo, est);
        EXPECT_GE(hi, est);
        EXPECT_LT(lo, prev_l);
        EXPECT_GT(hi, prev_u);
        prev_l = lo;
        prev_u = hi;
      }
      // x -> 0 leaves only the C-proportional shift below and the estimate above
      const double tiny = 1e-14;
      EXPECT_NEAR(lower_bound(n, r, m, c, tiny), gt_estimate(n, r, m) - coeffs_a(n, r).a3 / std::pow(double(n), r + 1.0) * c,
                  1e-6);
      EXPECT_NEAR(upper_bound(n, r, m, c, tiny), gt_estimate(n, r, m), 1e-6);
    }
}

TEST(Bounds, GuaranteesMayBeNegative) {
  const auto rep = interval_report(five_sample(), 1, 1.0);
  EXPECT_NEAR(rep.lower_guarantee, 1 - 6 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(rep.upper_guarantee, 1 - 7 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(rep.joint_guarantee, 1 - 13 * std::exp(-1.0), 1e-15);
  EXPECT_LT(rep.joint_guarantee, 0.0);
}

TEST(Deviations, ClosedForms) {
  EXPECT_DOUBLE_EQ(theta_left_deviation(0.5, 2.0), std::sqrt(2.0));
  const double level = std::max(c0_constant() / 2, 1.0 + std::log(100.0));
  EXPECT_NEAR(theta_right_deviation(0.01, 100, 2, 1.0), std::sqrt(0.02) + std::pow(2 * level / 100, 2) * 2.0 / 3, 1e-15);
  // the c0/2 floor matters only when x + log n is small
  EXPECT_NEAR(theta_right_deviation(0.0, 1, 1, 0.01), 2 * (c0_constant() / 2) * 0.02 / 3, 1e-15);
  EXPECT_DOUBLE_EQ(m_deviation(2.0, 1.0), 4.0 + 2.0 / 3);
  EXPECT_DOUBLE_EQ(c_lower_deviation(2.0, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(c_upper_deviation(2.0, 1.0), 4.0 + 4.0 / 3);
}
