#include "ncm/corner_norms.hpp"
#include "ncm/errors.hpp"
#include "ncm/random.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ncm;

TEST(Psi, Examples) {
  for (double p : {0.5, 1.0, 3.0}) EXPECT_EQ(psi_eval(0.0, p), 2.0);
  for (double t : {0.0, 0.3, 2.0, 40.0}) EXPECT_NEAR(psi_eval(t, 2.0), 2.0 + t, 1e-12 * (2.0 + t));
  EXPECT_NEAR(psi_eval(1.0, 4.0), psi_series_adaptive(1.0, 4.0).first, 1e-10);
  EXPECT_THROW(psi_eval(-1.0, 3.0), std::invalid_argument);
  EXPECT_THROW(psi_eval(1.0, 0.0), std::invalid_argument);
}

TEST(Psi, MatchesOracle) {
  for (double p : {0.5, 1.0, 3.0, std::numbers::pi, 5.0})
    for (double t : {1e-6, 1e-3, 0.1, 1.0, 3.9, 20.0, 100.0}) {
      const double want = static_cast<double>(oracle::psi(t, p));
      EXPECT_NEAR(psi_eval(t, p), want, 1e-13 * want);
    }
}

TEST(PsiSeries, Coefficients) {
  for (double p : {0.5, 3.0, 5.0}) {
    const auto s = psi_series(p, 6);
    EXPECT_EQ(s.order(), 6);
    EXPECT_EQ(s.coefficients[0], 2.0);
    EXPECT_NEAR(s.coefficients[1], p * p / 4.0, 1e-15);
    // lambda_n = (2/(2n)!) prod_{k<n} (p^2/4 - k^2)
    for (int n = 0; n <= 6; ++n) {
      long double prod = 2.0L;
      for (int k = 0; k < n; ++k) prod *= (p * p / 4.0L - k * k);
      for (int j = 1; j <= 2 * n; ++j) prod /= j;
      EXPECT_NEAR(s.coefficients[n], static_cast<double>(prod), 1e-15 * std::max(1.0L, std::abs(prod)));
    }
  }
  EXPECT_EQ(psi_series(2.0, 3).coefficients[2], 0.0);
}

TEST(PsiSeries, AgreementOnDisc) {
  for (double p : {0.5, 1.0, 1.5, 3.0, std::numbers::pi})
    for (int i = 0; i <= 70; ++i) {
      const double t = 0.05 * i;
      EXPECT_NEAR(psi_series_adaptive(t, p).first, psi_eval(t, p), 1e-10) << "p=" << p << " t=" << t;
    }
  EXPECT_THROW(psi_series_adaptive(4.5, 3.0), std::invalid_argument);
}

TEST(PsiTail, Examples) {
  EXPECT_FALSE(psi_tail_nonnegative(1.0, 1));
  EXPECT_LE(psi_tail_sign(1.0, 1.0, 1), 0.0);
  EXPECT_TRUE(psi_tail_nonnegative(5.0, 2));
  EXPECT_GE(psi_tail_sign(2.0, 5.0, 2), 0.0);
  EXPECT_LT(std::abs(psi_tail_sign(1e-4, 3.0, 2)), 1e-10);
}

TEST(PsiTail, SignRule) {
  for (double p : {0.5, 1.0, 3.0, 5.0})
    for (int N = 1; N <= 4; ++N) {
      const bool nonneg = psi_tail_nonnegative(p, N);
      EXPECT_EQ(nonneg, p >= 2 * N || static_cast<long long>(std::floor(N - p / 2.0)) % 2 != 0);
      for (int i = 1; i <= 200; ++i) {
        const double r = psi_tail_sign(0.5 * i, p, N);
        if (nonneg) EXPECT_GE(r, -1e-12);
        else EXPECT_LE(r, 1e-12);
      }
    }
}

TEST(PsiTail, QualitativeLemma) {
  std::vector<double> grid;
  for (int i = 1; i <= 200; ++i) grid.push_back(0.5 * i);
  for (double p : {0.5, 1.0, 3.0, 5.0})
    for (int N = 1; N <= 4; ++N) {
      const auto r = tail_positivity_check(p, N, grid);
      EXPECT_TRUE(r.pass) << "p=" << p << " N=" << N;
    }
}

TEST(PsiOde, Residual) {
  for (double p : {0.5, 1.0, 1.5, 3.0, std::numbers::pi, 5.0})
    for (int i = 0; i < 200; ++i) {
      const double t = 1e-3 * std::pow(5e4, i / 199.0);
      EXPECT_LE(std::abs(psi_ode_residual(t, p)), 1e-7 * (1.0 + psi_eval(t, p))) << "p=" << p << " t=" << t;
    }
}

TEST(CyclePolynomial, Examples) {
  EXPECT_EQ(cycle_polynomial_P(1), (std::vector<std::int64_t>{0, 1}));
  EXPECT_EQ(cycle_polynomial_P(2), (std::vector<std::int64_t>{0, 2, 1}));
  EXPECT_EQ(cycle_polynomial_P(3), (std::vector<std::int64_t>{0, 0, 3, 1}));
  EXPECT_THROW(cycle_polynomial_P(0), std::invalid_argument);
}

TEST(CyclePolynomial, ClosedForm) {
  for (int m = 1; m <= 12; ++m)
    for (int i = 0; i < 20; ++i) {
      const double x = 0.25 * i;
      const double rec = evaluate_cycle_polynomial(m, x);
      const double want = static_cast<double>(oracle::cycle_polynomial(m, x));
      EXPECT_LE(std::abs(rec - want), 1e-8 * std::max(1.0, std::abs(want)));
      EXPECT_LE(std::abs(cycle_polynomial_closed_form(m, x) - want), 1e-8 * std::max(1.0, std::abs(want)));
    }
}

TEST(CornerEmbed, Examples) {
  const ComplexMatrix a = corner_embed(ComplexMatrix::Ones(1, 1));
  EXPECT_EQ(a, elementary(2, 1, 2));
  EXPECT_EQ(ComplexMatrix(a * a), ComplexMatrix::Zero(2, 2));
  EXPECT_EQ(corner_embed(ComplexMatrix::Zero(2, 2)), ComplexMatrix::Zero(4, 4));
  Rng rng = make_rng(51);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix x = random_gaussian(3, rng);
    const ComplexMatrix e = corner_embed(x);
    EXPECT_EQ(ComplexMatrix(e * e), ComplexMatrix::Zero(6, 6));
    for (double q : {1.0, 2.0, 3.0, std::numbers::pi})
      EXPECT_NEAR(schatten_p_norm(e, q), std::pow(2.0, -1.0 / q) * schatten_p_norm(x, q), 1e-12);
  }
}

TEST(SumOfPowers, Identity) {
  Rng rng = make_rng(52);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix a = corner_embed(random_gaussian(2, rng));
    const auto quartet = square_zero_quartet(a);
    EXPECT_LT((quartet[0] - (a.adjoint() * a + a + a.adjoint())).norm(), 1e-14);
    for (int m = 1; m <= 6; ++m) {
      ComplexMatrix lhs = ComplexMatrix::Zero(a.rows(), a.cols());
      for (const auto& aj : quartet) {
        ComplexMatrix pw = ComplexMatrix::Identity(a.rows(), a.cols());
        for (int k = 0; k < m; ++k) pw = pw * aj;
        lhs += pw;
      }
      const ComplexMatrix rhs = 2.0 * evaluate_cycle_polynomial(m, ComplexMatrix(a.adjoint() * a)) +
                                2.0 * evaluate_cycle_polynomial(m, ComplexMatrix(a * a.adjoint()));
      EXPECT_LT((lhs - rhs).norm(), 1e-9 * std::max(1.0, rhs.norm()));
    }
  }
}

TEST(FourFunction, Identity) {
  Rng rng = make_rng(53);
  for (double p : {0.3, 0.5, 0.9}) {
    const ComplexMatrix a = corner_embed(random_gaussian(2, rng));
    const ComplexMatrix psis = 2.0 * hermitian_apply(ComplexMatrix(a.adjoint() * a), [p](double t) {
                                 return psi_eval(std::max(t, 0.0), p);
                               }) +
                               2.0 * hermitian_apply(ComplexMatrix(a * a.adjoint()), [p](double t) {
                                 return psi_eval(std::max(t, 0.0), p);
                               });
    const ComplexMatrix four = ComplexMatrix::Identity(a.rows(), a.cols()) * 4.0;
    EXPECT_LT((four_term_sum(a, p) - (psis - four)).norm(), 1e-9);
  }
}

TEST(FourTerm, Examples) {
  EXPECT_NEAR(four_term_defect(ComplexMatrix::Zero(2, 2), 1.5), 0.0, 1e-14);
  EXPECT_NEAR(four_term_defect(ComplexMatrix::Ones(1, 1), 0.5), std::pow(2.0, 1.5) - 4.0, 1e-12);
  Rng rng = make_rng(54);
  for (double p : {1.0, 1.7, 2.0, 3.0})
    for (int t = 0; t < 20; ++t) EXPECT_GE(four_term_defect(random_gaussian(2 + t % 2, rng), p), -1e-10);
}

TEST(EvenNorm, Examples) {
  const ComplexMatrix e12 = elementary(2, 1, 2);
  EXPECT_NEAR(recover_even_norm(e12, 3.0, 1).value, 0.5, 1e-6);
  EXPECT_EQ(recover_even_norm(ComplexMatrix::Zero(2, 2), 3.0, 1).value, 0.0);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  EXPECT_NEAR(recover_even_norm(corner_embed(d), 3.0, 2).value, 17.0 / 4.0, 1e-4);
}

TEST(EvenNorm, OracleOverload) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const ComplexMatrix a = corner_embed(d);
  const std::vector<double> lower{schatten_p_power(a, 2.0)};
  const auto r = recover_even_norm(make_norm_pair_oracle(a, 3.0), 3.0, 2, lower, operator_norm(a));
  EXPECT_NEAR(r.value, 17.0 / 4.0, 1e-4);
  EXPECT_EQ(r.ladder.size(), 4u);
  for (std::size_t i = 1; i < r.ladder.size(); ++i) EXPECT_NEAR(r.ladder[i], r.ladder[i - 1] / 2.0, 1e-15);
}

TEST(EvenNorm, LambdaZero) {
  // p = 2 makes lambda_2 = 0.
  EXPECT_THROW(recover_even_norm(elementary(2, 1, 2), 2.0, 2), LambdaZeroError);
}

TEST(EvenNorm, RandomCorners) {
  for (int inst = 0; inst < 10; ++inst) {
    Rng rng = make_rng(55, inst);
    const ComplexMatrix a = corner_embed(random_gaussian(2 + inst % 2, rng));
    for (int N : {1, 2})
      for (double p : {1.0, 3.0}) {
        const double direct = schatten_p_power(a, 2.0 * N);
        EXPECT_LE(std::abs(recover_even_norm(a, p, N).value - direct), 1e-3 * direct);
      }
  }
}

TEST(Truncation, Examples) {
  EXPECT_EQ(truncation_remainder(ComplexMatrix::Zero(2, 2), 3.0, 2, 1e-2), 0.0);
  Rng rng = make_rng(56);
  const ComplexMatrix x = random_gaussian(2, rng);
  // p = 2: |1 + rX|^2 = 1 + Y_r, so only the r^2 X*X part is truncated at n = 1
  // and nothing is left at n = 2.
  EXPECT_LT(truncation_remainder(x, 2.0, 2, 1e-2), 1e-9);
  for (double r : {1e-2, 5e-3}) {
    const double a = truncation_remainder(x, 3.0, 2, r);
    const double b = truncation_remainder(x, 3.0, 2, r / 2.0);
    EXPECT_LE(b, 0.6 * a);
  }
}
