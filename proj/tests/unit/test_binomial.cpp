#include "ncm/binomial.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ncm;

TEST(GeneralizedBinomial, Examples) {
  EXPECT_EQ(generalized_binomial(0.7, 0), 1.0);
  EXPECT_EQ(generalized_binomial(5.0, 2), 10.0);
  EXPECT_NEAR(generalized_binomial(0.5, 2), -0.125, 1e-16);
  EXPECT_EQ(generalized_binomial(3.0, -1), 0.0);
  EXPECT_EQ(generalized_binomial(Rational(1, 2), 3), Rational(1, 16));
}

TEST(GeneralizedBinomial, MatchesOracle) {
  for (double beta : {-2.5, -1.0, 0.25, 1.5, std::numbers::pi, 7.0})
    for (int k = 0; k <= 12; ++k) {
      const double want = static_cast<double>(oracle::binomial(beta, k));
      EXPECT_NEAR(generalized_binomial(beta, k), want, 1e-13 * std::max(1.0, std::abs(want)));
    }
}

TEST(AlphaCount, Examples) {
  EXPECT_EQ(alpha_count({true, false}), 1);
  EXPECT_EQ(alpha_count({true, true, false, false}), 1);
  EXPECT_EQ(alpha_count({false, false, false}), 0);
  EXPECT_EQ(alpha_count({true, false, true, false}), 2);
  EXPECT_THROW(alpha_count({}), std::invalid_argument);
}

TEST(AlphaCount, ExhaustiveBound) {
  for (int len = 1; len <= 12; ++len)
    for (unsigned bits = 0; bits < (1u << len); ++bits) {
      std::vector<bool> stars(len);
      for (int j = 0; j < len; ++j) stars[j] = (bits >> j) & 1u;
      const int a = alpha_count(stars);
      ASSERT_EQ(a, oracle::alpha(stars));
      ASSERT_LE(a, len / 2);
    }
}

TEST(MomentCoefficient, ClosedForms) {
  for (int i = 1; i <= 100; ++i) {
    const double p = 0.08 * i;
    EXPECT_NEAR(moment_coefficient(MomentCoefficientQuery::make(p, 2, 1)), p * p / 4.0, 1e-12);
    EXPECT_NEAR(moment_coefficient(MomentCoefficientQuery::make(p, 4, 1)),
                p * p * (p / 2.0 - 1.0) * (p / 2.0 - 2.0) / 24.0, 1e-12);
    EXPECT_NEAR(moment_coefficient(MomentCoefficientQuery::make(p, 1, 0)), p / 2.0, 1e-15);
  }
  EXPECT_EQ(moment_coefficient(MomentCoefficientQuery::make(4.0, 2, 1)), 4.0);
}

TEST(MomentCoefficient, MatchesOracle) {
  for (double p : {0.5, 1.0, 1.5, 3.0, std::numbers::pi, 5.5, 6.0})
    for (int N = 1; N <= 10; ++N)
      for (int a = 0; 2 * a <= N; ++a) {
        const auto q = MomentCoefficientQuery::make(p, N, a);
        const double want = static_cast<double>(oracle::moment_coefficient(p, N, a));
        EXPECT_NEAR(moment_coefficient(q), want, 1e-12 * std::max(1.0, std::abs(want)));
        EXPECT_NEAR(moment_coefficient_compensated(q), want, 1e-12 * std::max(1.0, std::abs(want)));
      }
}

TEST(MomentCoefficient, RejectsInvalidQuery) {
  EXPECT_THROW(MomentCoefficientQuery::make(0.0, 2, 1), std::invalid_argument);
  EXPECT_THROW(MomentCoefficientQuery::make(1.0, 0, 0), std::invalid_argument);
  EXPECT_THROW(MomentCoefficientQuery::make(1.0, 3, 2), std::invalid_argument);
  EXPECT_THROW(MomentCoefficientQuery::make(1.0, 3, -1), std::invalid_argument);
}

TEST(MomentCoefficient, Nonvanishing) {
  for (double p : {0.5, 1.0, 1.5, 3.0, std::numbers::pi, 5.5})
    for (int N = 1; N <= 10; ++N)
      for (int a = 0; 2 * a <= N; ++a) {
        EXPECT_TRUE(coefficient_guaranteed_nonzero(p, N, a));
        EXPECT_GT(std::abs(moment_coefficient(MomentCoefficientQuery::make(p, N, a))), 1e-12);
      }
}

TEST(MomentCoefficient, VanishesExactlyAtPredictedRoots) {
  // For p = 2m in the excluded regime the coefficient is (p/2) P(p/2 - 1), so
  // it vanishes exactly when P has a root at p/2 - 1.
  for (int m = 1; m <= 5; ++m)
    for (int N = 1; N <= 10; ++N)
      for (int a = 0; 2 * a <= N; ++a) {
        if (2 * m >= 2 * (N - a)) continue;
        const Rational p(2 * m);
        const Rational c = moment_coefficient_exact(p, N, a);
        const Rational root = root_polynomial(Rational(m - 1), N, a);
        EXPECT_EQ(c == 0, root == 0) << "p = " << 2 * m << " N = " << N << " alpha = " << a;
        EXPECT_EQ(c, Rational(m) * root);
        EXPECT_FALSE(coefficient_guaranteed_nonzero(2.0 * m, N, a));
      }
}

TEST(RootReport, Examples) {
  const auto r21 = coefficient_root_report(2, 1);
  EXPECT_TRUE(r21.pass);
  EXPECT_EQ(r21.points, std::vector<int>{-1});
  const auto r30 = coefficient_root_report(3, 0);
  EXPECT_TRUE(r30.pass);
  EXPECT_EQ(r30.points, (std::vector<int>{0, 1}));
  const auto r10 = coefficient_root_report(1, 0);
  EXPECT_TRUE(r10.pass);
  EXPECT_TRUE(r10.points.empty());
  EXPECT_EQ(r10.degree, 0);
  // P(beta) = beta + 1 for N = 2, alpha = 1.
  EXPECT_EQ(root_polynomial(Rational(5, 2), 2, 1), Rational(7, 2));
}

TEST(RootReport, AllPassUpToTen) {
  for (int N = 1; N <= 10; ++N)
    for (int a = 0; 2 * a <= N; ++a) {
      const auto r = coefficient_root_report(N, a);
      EXPECT_TRUE(r.pass);
      EXPECT_EQ(static_cast<int>(r.points.size()), N - 1);
      EXPECT_EQ(r.degree, N - 1);
    }
  EXPECT_THROW(coefficient_root_report(13, 0), std::invalid_argument);
}

TEST(Identities, ElementaryEquality) {
  for (int n = 0; n <= 10; ++n)
    for (int a = 0; a <= n; ++a)
      for (int k = 0; k <= n; ++k) {
        const Rational lhs = Rational(a) * generalized_binomial(Rational(a - 1), n - k) +
                             Rational(n - a) * generalized_binomial(Rational(a), n - k);
        EXPECT_EQ(lhs, Rational(k) * generalized_binomial(Rational(a), n - k));
      }
}

TEST(Identities, AlternatingMoments) {
  for (int a = 2; a <= 10; ++a)
    for (int i = 1; i < a; ++i) {
      Rational sum = 0;
      for (int k = 0; k <= a; ++k) {
        Rational term = generalized_binomial(Rational(a), k);
        for (int e = 0; e < i; ++e) term *= k;
        sum += (k % 2 == 0) ? term : Rational(-term);
      }
      EXPECT_EQ(sum, 0) << "alpha = " << a << " i = " << i;
    }
}
