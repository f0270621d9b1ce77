#include "ncm/binomial.hpp"
#include "ncm/errors.hpp"
#include "ncm/gadgets.hpp"
#include "ncm/random.hpp"
#include "ncm/reconstruction.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ncm;

namespace {

ComplexMatrix scalar(double v) { return ComplexMatrix::Constant(1, 1, v); }

StarWord pattern_word(int n, unsigned bits, int family_size, Rng& rng) {
  std::uniform_int_distribution<int> idx(1, family_size);
  StarWord w;
  for (int j = 0; j < n; ++j) w.push_back({idx(rng), ((bits >> j) & 1u) != 0});
  return w;
}

}  // namespace

TEST(GramCoefficient, Examples) {
  Rng rng = make_rng(21);
  const std::vector<ComplexMatrix> x{random_gaussian(2, rng), random_gaussian(2, rng)};
  const auto g1 = compact_family(1);
  const ComplexMatrix c1 = gram_deviation_coefficient(g1, x, parse_word("1"), 1);
  EXPECT_LT((c1 - kron(g1.matrices[0], x[0])).norm(), 1e-14);

  const auto g2 = compact_family(2);
  const StarWord w = parse_word("1*,2");
  const Complex t = word_trace(x, w);
  EXPECT_NEAR(std::abs(normalized_trace(gram_deviation_coefficient(g2, x, w, 2)) - 2.0 * t), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(normalized_trace(gram_deviation_coefficient(g2, x, w, 3))), 0.0, 1e-14);
}

TEST(GramCoefficient, MatchesBruteForceExpansion) {
  Rng rng = make_rng(22);
  const std::vector<ComplexMatrix> x{random_gaussian(2, rng), random_gaussian(2, rng)};
  for (int n = 1; n <= 3; ++n) {
    const auto g = compact_family(n);
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      const StarWord w = pattern_word(n, bits, 2, rng);
      for (int k = 0; k <= n; ++k) {
        const ComplexMatrix got = gram_deviation_coefficient(g, x, w, k);
        const ComplexMatrix want = oracle::gram_coefficient(g.matrices, x, w, k);
        EXPECT_LT((got - want).norm(), 1e-11 * std::max(1.0, want.norm())) << to_string(w) << " k=" << k;
      }
    }
  }
}

TEST(GramCoefficient, CombinatorialLemma) {
  // tr(coefficient) = tau(word) k binom(alpha, n - k) for every pattern.
  for (int inst = 0; inst < 5; ++inst) {
    Rng rng = make_rng(23, inst);
    const std::vector<ComplexMatrix> x{random_gaussian(2, rng), random_gaussian(2, rng)};
    for (int n = 1; n <= 4; ++n) {
      const auto g = compact_family(n);
      for (unsigned bits = 0; bits < (1u << n); ++bits) {
        const StarWord w = pattern_word(n, bits, 2, rng);
        const int a = oracle::alpha(star_pattern(w));
        const Complex tau = oracle::word_trace(x, w);
        for (int k = 0; k <= n; ++k) {
          const Complex want = tau * static_cast<double>(k * oracle::binomial(a, n - k));
          const Complex got = normalized_trace(gram_deviation_coefficient(g, x, w, k));
          EXPECT_LT(std::abs(got - want), 1e-9) << to_string(w) << " k=" << k;
        }
      }
    }
  }
}

TEST(GramCoefficient, Guard) {
  const auto g = compact_family(6);
  const std::vector<ComplexMatrix> x{ComplexMatrix::Identity(1, 1)};
  EXPECT_THROW(gram_deviation_coefficient(g, x, parse_word("1,1,1,1,1,1"), 4), GuardExceededError);
}

TEST(NormOracle, Examples) {
  for (double p : {1.0, 3.0}) {
    const auto g1 = compact_family(1);
    const std::vector<ComplexMatrix> one{scalar(1.0)};
    const NormOracle o = make_norm_oracle(g1, one, parse_word("1"), p);
    const std::vector<Complex> zero{0.0};
    EXPECT_NEAR(o.evaluate(zero), 1.0, 1e-12);
    for (double t : {-0.4, 0.1, 0.7}) {
      const std::vector<Complex> z{t};
      EXPECT_NEAR(o.evaluate(z), std::pow(std::abs(1.0 + t), p), 1e-12);
    }
    const std::vector<ComplexMatrix> e12{elementary(2, 1, 2)};
    const NormOracle o2 = make_norm_oracle(g1, e12, parse_word("1"), p);
    for (double t : {0.1, 0.5, 2.0}) {
      ComplexMatrix s = ComplexMatrix::Identity(2, 2) + t * elementary(2, 1, 2);
      const std::vector<Complex> z{t};
      EXPECT_NEAR(o2.evaluate(z), oracle::schatten_power(s, p), 1e-12);
    }
  }
}

TEST(NormOracle, Deterministic) {
  Rng rng = make_rng(24);
  const std::vector<ComplexMatrix> x{random_gaussian(3, rng), random_gaussian(3, rng)};
  const auto g = compact_family(3);
  const NormOracle o = make_norm_oracle(g, x, parse_word("1*,2,1"), 1.5);
  const std::vector<Complex> z{{0.01, 0.02}, {-0.03, 0.0}, {0.0, 0.01}};
  EXPECT_EQ(o.evaluate(z), o.evaluate(z));
}

TEST(NormOracle, Rejects) {
  const auto g = compact_family(1);
  const std::vector<ComplexMatrix> x{scalar(1.0)};
  EXPECT_THROW(make_norm_oracle(g, x, parse_word("1"), 0.0), std::invalid_argument);
  EXPECT_THROW(make_norm_oracle(g, x, parse_word("1,1"), 3.0), std::invalid_argument);
  EXPECT_THROW(make_norm_oracle(g, x, parse_word("2"), 3.0), std::invalid_argument);
}

TEST(FourierEstimate, Examples) {
  const auto g1 = compact_family(1);
  const std::vector<ComplexMatrix> zero{ComplexMatrix::Zero(2, 2)};
  const NormOracle oz = make_norm_oracle(g1, zero, parse_word("1"), 3.0);
  EXPECT_EQ(fourier_moment_estimate(oz, parse_word("1"), 1e-2, 7), Complex(0.0));

  const std::vector<ComplexMatrix> one{scalar(1.0)};
  const NormOracle o1 = make_norm_oracle(g1, one, parse_word("1"), 4.0);
  EXPECT_NEAR(std::abs(fourier_moment_estimate(o1, parse_word("1"), 1e-2, 7) - 2.0), 0.0, 1e-3);

  const auto g2 = compact_family(2);
  const std::vector<ComplexMatrix> ones{scalar(1.0), scalar(1.0)};
  const NormOracle o2 = make_norm_oracle(g2, ones, parse_word("1*,2"), 3.0);
  EXPECT_NEAR(std::abs(fourier_moment_estimate(o2, parse_word("1*,2"), 1e-2, 7) - 2.25), 0.0, 1e-3);
}

TEST(FourierEstimate, SecondOrderDecay) {
  // Halving r shrinks the error against the extrapolated limit by about 4.
  Rng rng = make_rng(25);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = oracle::unit_ball_family(2, 2, rng);
    const StarWord w = parse_word("1*,2");
    const auto g = compact_family(2);
    const double p = 3.0;
    const NormOracle o = make_norm_oracle(g, x, w, p);
    const int q = 2 * 2 + 3;
    const double limit = moment_coefficient(MomentCoefficientQuery::make(p, 2, 1));
    const Complex exact = limit * oracle::word_trace(x, w);
    const double r = o.info().admissible_radius / 2.0;
    const double e1 = std::abs(fourier_moment_estimate(o, w, r, q) - exact);
    const double e2 = std::abs(fourier_moment_estimate(o, w, r / 2.0, q) - exact);
    EXPECT_GE(e1 / e2, 3.5) << "trial " << trial;
  }
}

TEST(FourierEstimate, RejectsBadArguments) {
  const auto g1 = compact_family(1);
  const std::vector<ComplexMatrix> one{scalar(1.0)};
  const NormOracle o = make_norm_oracle(g1, one, parse_word("1"), 3.0);
  EXPECT_THROW(fourier_moment_estimate(o, parse_word("1"), 1e-2, 2), std::invalid_argument);
  EXPECT_THROW(fourier_moment_estimate(o, parse_word("1"), 0.0, 5), std::invalid_argument);
  EXPECT_THROW(fourier_moment_estimate(o, parse_word("1"), 10.0, 5), InadmissibleRadiusError);
}

TEST(ErrorModel, EvenQOrLargeQ) {
  EXPECT_TRUE(error_is_even_in_r(4, 3));
  EXPECT_TRUE(error_is_even_in_r(9, 3));
  EXPECT_FALSE(error_is_even_in_r(3, 2));
  EXPECT_FALSE(error_is_even_in_r(5, 2));
  EXPECT_TRUE(error_is_even_in_r(7, 2));
}

TEST(Richardson, PolynomialIsExact) {
  // v(h) = 3 + 2h + 5h^2 is extrapolated exactly with order 2.
  const std::vector<double> h{0.4, 0.2, 0.1, 0.05};
  std::vector<Complex> v;
  for (double x : h) v.push_back(3.0 + 2.0 * x + 5.0 * x * x);
  const auto [limit, residual] = richardson_limit(h, v, 2);
  EXPECT_NEAR(std::abs(limit - 3.0), 0.0, 1e-12);
  EXPECT_LT(residual, 1e-12);
}

TEST(Extrapolated, Examples) {
  const auto g = compact_family(2);
  const std::vector<ComplexMatrix> zero{ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2)};
  const NormOracle o = make_norm_oracle(g, zero, parse_word("1*,2"), 3.0);
  ExtrapolationPlan plan = ExtrapolationPlan::default_for(o.info());
  EXPECT_EQ(plan.q, 7);
  EXPECT_EQ(plan.radii.size(), 4u);
  EXPECT_EQ(extrapolated_moment(o, parse_word("1*,2"), 3.0, plan).value, Complex(0.0));
}

TEST(Extrapolated, ZeroCoefficient) {
  // p = 2: C(2, 2, 0) = 2 binom(1, 2) = 0.
  const auto g = compact_family(2);
  const std::vector<ComplexMatrix> one{scalar(1.0)};
  const NormOracle o = make_norm_oracle(g, one, parse_word("1,1"), 2.0);
  EXPECT_THROW(extrapolated_moment(o, parse_word("1,1"), 2.0, ExtrapolationPlan::default_for(o.info())),
               ZeroCoefficientError);
}

TEST(Extrapolated, NonConvergence) {
  Rng rng = make_rng(26);
  const auto x = oracle::unit_ball_family(2, 2, rng);
  const auto g = compact_family(2);
  const NormOracle o = make_norm_oracle(g, x, parse_word("1*,2"), 3.0);
  ExtrapolationPlan plan = ExtrapolationPlan::default_for(o.info());
  plan.tolerance = 1e-30;
  EXPECT_THROW(extrapolated_moment(o, parse_word("1*,2"), 3.0, plan), NonConvergenceError);
}

TEST(Reconstruct, MatchesWordTrace) {
  for (double p : {1.0, 1.5, 3.0, std::numbers::pi}) {
    Rng rng = make_rng(27, static_cast<std::uint64_t>(p * 1000));
    for (const char* w : {"1", "1*", "1*,2", "2,1", "1*,2,1", "2,2*,1"}) {
      const auto x = oracle::unit_ball_family(2, 3, rng);
      const StarWord word = parse_word(w);
      const auto rec = reconstruct_word_trace(x, word, p);
      EXPECT_LT(std::abs(rec.estimate - oracle::word_trace(x, word)), 1e-4) << w << " p=" << p;
    }
  }
}

TEST(Reconstruct, ConjugationInvariant) {
  Rng rng = make_rng(28);
  const auto x = oracle::unit_ball_family(2, 3, rng);
  const ComplexMatrix u = random_unitary(3, rng);
  std::vector<ComplexMatrix> y;
  for (const auto& e : x) y.push_back(u * e * u.adjoint());
  const StarWord w = parse_word("1*,2,1");
  EXPECT_LT(std::abs(reconstruct_word_trace(x, w, 1.5).estimate - reconstruct_word_trace(y, w, 1.5).estimate), 2e-4);
}

TEST(Reconstruct, EvenPInAllowedRegime) {
  EXPECT_EQ(moment_coefficient(MomentCoefficientQuery::make(4.0, 2, 1)), 4.0);
  Rng rng = make_rng(29);
  const auto x = oracle::unit_ball_family(2, 2, rng);
  const StarWord w = parse_word("1*,2");
  EXPECT_LT(std::abs(reconstruct_word_trace(x, w, 4.0).estimate - oracle::word_trace(x, w)), 1e-4);
}

TEST(Reconstruct, LargeElementsAreRescaled) {
  Rng rng = make_rng(30);
  std::vector<ComplexMatrix> x{random_with_norm(2, 5.0, rng), random_with_norm(2, 0.3, rng)};
  const StarWord w = parse_word("1*,2");
  const auto rec = reconstruct_word_trace(x, w, 3.0);
  EXPECT_NEAR(rec.scale, 1.5, 1e-12);
  EXPECT_LT(std::abs(rec.estimate - oracle::word_trace(x, w)), 1e-4 * rec.scale);
}

TEST(Reconstruct, ThreePointRootsMode) {
  Rng rng = make_rng(31);
  const auto x = oracle::unit_ball_family(2, 2, rng);
  const StarWord w = parse_word("1*,2");
  ReconstructOptions opt;
  opt.q = 3;
  EXPECT_LT(std::abs(reconstruct_word_trace(x, w, 3.0, opt).estimate - oracle::word_trace(x, w)), 1e-3);
}
