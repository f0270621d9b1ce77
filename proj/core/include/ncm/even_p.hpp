#pragma once

// For p = 2m the norm ||1 + sum_j a_j (x) x_j||_{2m}^{2m} is a finite sum of
// tr(a-word) tau(x-word) over words of length <= 2m with combinatorial weights.

#include "ncm/matrix.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ncm {

/// sum_{1 <= j <= k} (j/k) binom(m, j) binom(alpha, k - j); 1 for k = 0.
double even_weight(int m, int k, int alpha);

/// Weight of a word; depends on its length and star pattern only.
double even_weight(int m, const StarWord& word);

struct EvenNormTerm {
  StarWord word;
  double weight = 0.0;
};

struct EvenNormExpansion {
  int m = 1;
  int family_size = 0;
  std::vector<EvenNormTerm> terms;  // nonzero weights only
};

/// Throws GuardExceededError when (2 family_size)^{2m} > 1e6.
EvenNormExpansion even_norm_expansion(int family_size, int m);

/// sum over words of tr_n(a-word) tau(x-word) weight. coeffs are n x n,
/// elements d x d, one coefficient per element.
double expand_even_norm(std::span<const ComplexMatrix> coeffs, std::span<const ComplexMatrix> elements, int m);

/// ||1 + sum_j a_j (x) x_j||_{2m}^{2m} by spectral computation.
double direct_even_norm(std::span<const ComplexMatrix> coeffs, std::span<const ComplexMatrix> elements, int m);

struct LevelGap {
  int level = 0;
  double max_gap = 0.0;
};

struct EvenTransferReport {
  bool pass = true;
  std::string formulation;
  int constrained_words = 0;
  double moment_gap = 0.0;  // largest gap among the constrained moments
  double max_gap = 0.0;     // largest norm gap over all levels
  std::vector<LevelGap> levels;
  int trials = 0;
  std::uint64_t seed = 0;
};

inline constexpr double kConstrainedMomentTolerance = 1e-9;
inline constexpr double kTransferNormTolerance = 1e-8;

/// Checks that every word carrying nonzero weight in the 2m-expansion has
/// the same trace in both families (else PreconditionFailedError naming the
/// word), then compares ||1 + sum a_j (x) x_j||_{2m} with the y version for
/// seeded random a_j at each level.
EvenTransferReport even_p_transfer_check(std::span<const ComplexMatrix> x_family,
                                         std::span<const ComplexMatrix> y_family, int m,
                                         std::span<const int> levels, int trials, std::uint64_t seed);

/// Coefficient of z_1 ... z_{2m} in ||X||_{2m}^{2m} with
/// X = sum_j conj(z_{2j-1}) a_{2j-1}^* (x) x_{i_{2j-1}} + z_{2j} a_{2j} (x) x_{i_{2j}}
/// over the compact gadget of size 2m, by exact expansion. Equals
/// m tau(x_{i1}^* x_{i2} ... x_{i_{2m-1}}^* x_{i_{2m}}).
Complex semifinite_coefficient(std::span<const ComplexMatrix> family, std::span<const int> indices);

/// The identity-free variant: matching semifinite coefficients for all index
/// tuples, then matching ||sum a_j (x) x_j||_{2m} at each level.
EvenTransferReport semifinite_transfer_check(std::span<const ComplexMatrix> x_family,
                                             std::span<const ComplexMatrix> y_family, int m,
                                             std::span<const int> levels, int trials, std::uint64_t seed);

}  // namespace ncm
