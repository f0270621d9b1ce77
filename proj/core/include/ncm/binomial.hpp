#pragma once

// Generalized binomial coefficients, the alpha statistic of star patterns and
// the moment coefficient C(p, N, alpha) that scales a *-moment inside the
// expansion of ||1 + sum z_j a_j (x) x_j||_p^p.

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace ncm {

using Rational = boost::multiprecision::cpp_rational;

/// beta (beta-1) ... (beta-k+1) / k!; 1 for k = 0, 0 for k < 0.
double generalized_binomial(double beta, int k);
Rational generalized_binomial(const Rational& beta, int k);

/// Exact rational value of a finite double.
Rational to_rational(double value);

/// Number of cyclic positions j with stars[j] = * and stars[j+1] = 1.
/// Throws std::invalid_argument for an empty pattern.
int alpha_count(const std::vector<bool>& stars);

struct MomentCoefficientQuery {
  double p = 1.0;
  int n = 1;
  int alpha = 0;

  /// Throws std::invalid_argument unless p > 0, n >= 1 and 0 <= alpha <= n/2.
  static MomentCoefficientQuery make(double p, int n, int alpha);
};

/// sum_{k=0}^{alpha} (n-k) binom(p/2, n-k) binom(alpha, k), evaluated exactly on
/// the rational value of p and rounded once.
double moment_coefficient(const MomentCoefficientQuery& q);
Rational moment_coefficient_exact(const Rational& p, int n, int alpha);

/// Same sum in floating point with Neumaier compensation; a cross-check.
double moment_coefficient_compensated(const MomentCoefficientQuery& q);

/// True when the coefficient is guaranteed nonzero: p not an even integer,
/// or p >= 2 (n - alpha).
bool coefficient_guaranteed_nonzero(double p, int n, int alpha);

struct RootReport {
  int n = 0;
  int alpha = 0;
  int degree = 0;                  // n - 1
  std::vector<int> points;         // integers in [-alpha, n - alpha - 2]
  std::vector<double> abs_values;  // |P(beta)| at each point
  bool pass = false;
};

/// Evaluates P(beta) = sum_k binom(beta, n-k-1) binom(alpha, k) exactly at the
/// integers where it must vanish. Requires 1 <= n <= 12, 0 <= alpha <= n/2.
RootReport coefficient_root_report(int n, int alpha, double tolerance = 1e-8);

/// P(beta) at an arbitrary rational point.
Rational root_polynomial(const Rational& beta, int n, int alpha);

}  // namespace ncm
