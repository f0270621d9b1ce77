#pragma once

// Square-zero elements and the function
//
//     psi(t) = (1 + (t + sqrt(t^2 + 4t))/2)^{p/2} + (1 + (t - sqrt(t^2 + 4t))/2)^{p/2},
//
// through which |1 +- a|^p + |1 +- a^*|^p is expressed when a^2 = 0. Its
// Taylor coefficients at 0 let even Schatten norms be read off p-norms.

#include "ncm/matrix.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace ncm {

/// The smaller base is clamped at 0 when rounding pushes it below.
double psi_eval(double t, double p);

/// lambda_n = (2 / (2n)!) prod_{k<n} (p^2/4 - k^2), n = 0..N.
struct PsiSeries {
  double p = 1.0;
  std::vector<double> coefficients;

  int order() const { return static_cast<int>(coefficients.size()) - 1; }
  /// Partial sum sum_{n <= N} lambda_n t^n (Horner).
  double operator()(double t) const;
};

PsiSeries psi_series(double p, int N);

/// Taylor sum of psi at t, truncated once terms fall below `tol` relative to
/// the running sum. The series converges for |t| < 4. Returns {value, terms used}.
std::pair<double, int> psi_series_adaptive(double t, double p, double tol = 1e-17, int max_terms = 4000);

/// psi(t) - sum_{n <= N} lambda_n t^n.
double psi_tail_sign(double t, double p, int N);

/// True when psi(t) - sum_{n <= N} lambda_n t^n is predicted >= 0 for t > 0:
/// p >= 2N, or floor(N - p/2) odd.
bool psi_tail_nonnegative(double p, int N);

/// (t^2 + 4t) psi'' + (t + 2) psi' - (p^2/4) psi by central differences with
/// step 1e-4 max(t, 1).
double psi_ode_residual(double t, double p);

struct TailPositivityReport {
  bool pass = true;
  double t0 = 0.0;
  double min_value = 0.0;   // minimum of the signed tail over the grid
  double first_slope = 0.0; // finite-difference slope at t0
};

/// With y = sign * (psi - partial sum), sign chosen so that y(t0) > 0,
/// checks y stays above -floor on `grid` (sorted ascending).
TailPositivityReport tail_positivity_check(double p, int N, std::span<const double> grid,
                                           double floor = 1e-12);

/// Coefficients of P_m, ascending in degree: P_1 = X, P_2 = X^2 + 2X,
/// P_{m+2} = X (P_{m+1} + P_m).
std::vector<std::int64_t> cycle_polynomial_P(int m);

double evaluate_cycle_polynomial(int m, double x);
ComplexMatrix evaluate_cycle_polynomial(int m, const ComplexMatrix& x);

/// ((X + sqrt(X^2 + 4X))/2)^m + ((X - sqrt(X^2 + 4X))/2)^m, for X >= 0.
double cycle_polynomial_closed_form(int m, double x);

/// [[0, x], [0, 0]].
ComplexMatrix corner_embed(const ComplexMatrix& x);

/// a*a + a + a*, a*a - a - a*, aa* + a + a*, aa* - a - a*.
std::array<ComplexMatrix, 4> square_zero_quartet(const ComplexMatrix& a);

/// |1+a|^p + |1-a|^p + |1+a*|^p + |1-a*|^p.
ComplexMatrix four_term_sum(const ComplexMatrix& a, double p);

/// Smallest eigenvalue of four_term_sum(A, p) - 4.
double four_term_defect(const ComplexMatrix& a, double p);

/// t -> {||1 + t a||_p^p, ||1 - t a||_p^p}.
using NormPairOracle = std::function<std::pair<double, double>(double)>;

NormPairOracle make_norm_pair_oracle(const ComplexMatrix& a, double p);

struct EvenNormRecovery {
  double value = 0.0;
  double residual = 0.0;
  std::vector<double> ladder;  // t values used
};

struct EvenNormOptions {
  /// Largest acceptable Richardson residual relative to max(1, |value|).
  double tolerance = 1e-3;
  int richardson_order = 2;
};

/// Recovers ||a||_{2N}^{2N} for square-zero a from the oracle, given
/// lower_norms[n-1] = ||a||_{2n}^{2n} for n < N and an upper bound on ||a||.
/// Throws LambdaZeroError when p = 2n for some n < N and NonConvergenceError
/// when the extrapolation does not settle.
EvenNormRecovery recover_even_norm(const NormPairOracle& oracle, double p, int N,
                                   std::span<const double> lower_norms, double norm_bound,
                                   const EvenNormOptions& options = {});

/// Same, with the oracle, norm bound and lower norms taken from `a` directly.
EvenNormRecovery recover_even_norm(const ComplexMatrix& a, double p, int N,
                                   const EvenNormOptions& options = {});

/// ||r^{-n} (|1 + rX|^p - Q_n(sum_{j<=n} binom(p/2, j) Y_r^j))|| with
/// Y_r = r(X + X^*) + r^2 X^*X, where Q_n drops powers of r above n.
double truncation_remainder(const ComplexMatrix& x, double p, int n, double r);

}  // namespace ncm
