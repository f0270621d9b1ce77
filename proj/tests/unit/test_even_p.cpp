#include "ncm/errors.hpp"
#include "ncm/even_p.hpp"
#include "ncm/random.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ncm;

namespace {

std::vector<ComplexMatrix> random_family(int count, int dim, Rng& rng) {
  std::vector<ComplexMatrix> out;
  for (int i = 0; i < count; ++i) out.push_back(random_with_norm(dim, 0.8, rng));
  return out;
}

}  // namespace

TEST(Weight, SmallValues) {
  EXPECT_EQ(even_weight(3, 0, 0), 1.0);
  EXPECT_EQ(even_weight(1, 1, 0), 1.0);
  EXPECT_EQ(even_weight(1, 2, 1), 0.5);
  EXPECT_EQ(even_weight(1, 2, 0), 0.0);
  // m = 2, k = 2: (1/2) 2 binom(a, 1) + binom(2, 2) binom(a, 0)
  EXPECT_EQ(even_weight(2, 2, 0), 1.0);
  EXPECT_EQ(even_weight(2, 2, 1), 2.0);
  EXPECT_EQ(even_weight(2, parse_word("1,1*,2")), 2.0 / 3.0);
}

TEST(Expansion, Examples) {
  Rng rng = make_rng(61);
  const std::vector<ComplexMatrix> one{ComplexMatrix::Ones(1, 1)};
  const std::vector<ComplexMatrix> zero{ComplexMatrix::Zero(2, 2)};
  EXPECT_NEAR(expand_even_norm(one, zero, 2), 1.0, 1e-15);

  const ComplexMatrix x = random_gaussian(2, rng);
  const std::vector<ComplexMatrix> xs{x};
  const double m1 = 1.0 + normalized_trace(x + x.adjoint()).real() + normalized_trace(x.adjoint() * x).real();
  EXPECT_NEAR(expand_even_norm(one, xs, 1), m1, 1e-12);
  EXPECT_NEAR(direct_even_norm(one, xs, 1), m1, 1e-12);

  const std::vector<ComplexMatrix> a{random_gaussian(2, rng)};
  const std::vector<ComplexMatrix> y{random_gaussian(2, rng)};
  const double want = oracle::even_norm_power(a, y, 2);
  EXPECT_NEAR(expand_even_norm(a, y, 2), want, 1e-9 * want);
}

TEST(Expansion, MatchesDirectNorm) {
  for (int trial = 0; trial < 30; ++trial) {
    Rng rng = make_rng(62, trial);
    const int m = 1 + trial % 3;
    const int size = m == 3 ? 1 : 2;
    const auto a = random_family(size, 1 + trial % 3, rng);
    const auto x = random_family(size, 1 + (trial / 3) % 3, rng);
    const double want = oracle::even_norm_power(a, x, m);
    EXPECT_NEAR(expand_even_norm(a, x, m), want, 1e-9 * std::max(1.0, want)) << "m=" << m;
    EXPECT_NEAR(direct_even_norm(a, x, m), want, 1e-9 * std::max(1.0, want));
  }
}

TEST(Expansion, TermsHaveBoundedLength) {
  const auto e = even_norm_expansion(2, 2);
  for (const auto& t : e.terms) {
    EXPECT_LE(t.word.size(), 4u);
    EXPECT_NE(t.weight, 0.0);
    EXPECT_TRUE(std::isfinite(t.weight));
  }
  EXPECT_THROW(even_norm_expansion(10, 3), GuardExceededError);
}

TEST(Transfer, SameAndConjugated) {
  Rng rng = make_rng(63);
  const auto x = random_family(2, 2, rng);
  const std::vector<int> levels{1, 2, 3};
  EXPECT_TRUE(even_p_transfer_check(x, x, 2, levels, 3, 1).pass);
  const ComplexMatrix u = random_unitary(2, rng);
  std::vector<ComplexMatrix> y;
  for (const auto& e : x) y.push_back(u * e * u.adjoint());
  const auto r = even_p_transfer_check(x, y, 2, levels, 3, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.levels.size(), 3u);
  EXPECT_LE(r.max_gap, 1e-8);
  EXPECT_FALSE(r.formulation.empty());
  EXPECT_GT(r.constrained_words, 0);
}

TEST(Transfer, TranspositionFailsPrecondition) {
  const ComplexMatrix x = elementary(2, 1, 2) + 2.0 * elementary(2, 2, 1);
  const std::vector<ComplexMatrix> xs{x, elementary(2, 1, 1)};
  const std::vector<ComplexMatrix> ts{x.transpose(), elementary(2, 1, 1)};
  const std::vector<int> levels{1, 2};
  try {
    even_p_transfer_check(xs, ts, 2, levels, 2, 1);
    FAIL() << "expected PreconditionFailedError";
  } catch (const PreconditionFailedError& e) {
    const StarWord w = parse_word(e.detail());
    EXPECT_LE(w.size(), 4u);
    EXPECT_NE(even_weight(2, w), 0.0);
    EXPECT_GT(std::abs(oracle::word_trace(xs, w) - oracle::word_trace(ts, w)), 1e-9);
  }
}

TEST(Semifinite, CoefficientIsScaledMoment) {
  Rng rng = make_rng(64);
  const auto x = random_family(2, 2, rng);
  for (const std::vector<int>& idx : std::vector<std::vector<int>>{{1, 2}, {2, 1}, {1, 2, 2, 1}, {2, 2, 1, 2}}) {
    StarWord w;
    for (std::size_t s = 0; s < idx.size(); ++s) w.push_back({idx[s], s % 2 == 0});
    const Complex want = static_cast<double>(idx.size() / 2) * oracle::word_trace(x, w);
    EXPECT_LT(std::abs(semifinite_coefficient(x, idx) - want), 1e-12) << to_string(w);
  }
  EXPECT_THROW(semifinite_coefficient(x, std::vector<int>{1, 2, 1}), std::invalid_argument);
}

TEST(Semifinite, Transfer) {
  Rng rng = make_rng(65);
  const auto x = random_family(2, 2, rng);
  const ComplexMatrix u = random_unitary(2, rng);
  std::vector<ComplexMatrix> y;
  for (const auto& e : x) y.push_back(u * e * u.adjoint());
  const std::vector<int> levels{1, 2, 3, 4};
  EXPECT_TRUE(semifinite_transfer_check(x, y, 2, levels, 2, 3).pass);
  const std::vector<ComplexMatrix> doubled{2.0 * x[0], x[1]};
  EXPECT_THROW(semifinite_transfer_check(x, doubled, 2, levels, 2, 3), PreconditionFailedError);
}
