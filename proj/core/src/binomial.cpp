#include "ncm/binomial.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ncm {

double generalized_binomial(double beta, int k) {
  if (k < 0) return 0.0;
  double value = 1.0;
  for (int i = 0; i < k; ++i) value *= (beta - i) / static_cast<double>(i + 1);
  return value;
}

Rational generalized_binomial(const Rational& beta, int k) {
  if (k < 0) return Rational(0);
  Rational value(1);
  for (int i = 0; i < k; ++i) value = value * (beta - i) / (i + 1);
  return value;
}

Rational to_rational(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("to_rational: non-finite value");
  int exponent = 0;
  const double mantissa = std::frexp(value, &exponent);
  // mantissa * 2^53 is an exact integer.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  Rational r(scaled);
  const int shift = exponent - 53;
  boost::multiprecision::cpp_int power(1);
  power <<= std::abs(shift);
  return shift >= 0 ? Rational(r * power) : Rational(r / power);
}

int alpha_count(const std::vector<bool>& stars) {
  if (stars.empty()) throw std::invalid_argument("alpha_count: empty star pattern");
  const std::size_t n = stars.size();
  int alpha = 0;
  for (std::size_t j = 0; j < n; ++j)
    if (stars[j] && !stars[(j + 1) % n]) ++alpha;
  return alpha;
}

MomentCoefficientQuery MomentCoefficientQuery::make(double p, int n, int alpha) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("moment coefficient: p must be finite and positive");
  if (n < 1) throw std::invalid_argument("moment coefficient: N must be >= 1");
  if (alpha < 0 || 2 * alpha > n)
    throw std::invalid_argument("moment coefficient: need 0 <= alpha <= N/2, got alpha = " +
                                std::to_string(alpha) + ", N = " + std::to_string(n));
  return {p, n, alpha};
}

Rational moment_coefficient_exact(const Rational& p, int n, int alpha) {
  const Rational half_p = p / 2;
  Rational sum(0);
  for (int k = 0; k <= alpha; ++k)
    sum += Rational(n - k) * generalized_binomial(half_p, n - k) *
           generalized_binomial(Rational(alpha), k);
  return sum;
}

double moment_coefficient(const MomentCoefficientQuery& q) {
  const auto checked = MomentCoefficientQuery::make(q.p, q.n, q.alpha);
  return static_cast<double>(moment_coefficient_exact(to_rational(checked.p), checked.n, checked.alpha));
}

double moment_coefficient_compensated(const MomentCoefficientQuery& q) {
  const auto checked = MomentCoefficientQuery::make(q.p, q.n, q.alpha);
  double sum = 0.0;
  double compensation = 0.0;
  for (int k = 0; k <= checked.alpha; ++k) {
    const double term = (checked.n - k) * generalized_binomial(checked.p / 2.0, checked.n - k) *
                        generalized_binomial(static_cast<double>(checked.alpha), k);
    const double t = sum + term;
    compensation += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + compensation;
}

bool coefficient_guaranteed_nonzero(double p, int n, int alpha) {
  const double half = p / 2.0;
  const bool even_integer = std::floor(half) == half;
  return !even_integer || p >= 2.0 * (n - alpha);
}

Rational root_polynomial(const Rational& beta, int n, int alpha) {
  Rational sum(0);
  for (int k = 0; k <= alpha; ++k)
    sum += generalized_binomial(beta, n - k - 1) * generalized_binomial(Rational(alpha), k);
  return sum;
}

RootReport coefficient_root_report(int n, int alpha, double tolerance) {
  if (n < 1 || n > 12) throw std::invalid_argument("coefficient_root_report: need 1 <= N <= 12");
  if (alpha < 0 || 2 * alpha > n)
    throw std::invalid_argument("coefficient_root_report: need 0 <= alpha <= N/2");
  RootReport report;
  report.n = n;
  report.alpha = alpha;
  report.degree = n - 1;
  report.pass = true;
  for (int beta = -alpha; beta <= n - alpha - 2; ++beta) {
    const double value = std::abs(static_cast<double>(root_polynomial(Rational(beta), n, alpha)));
    report.points.push_back(beta);
    report.abs_values.push_back(value);
    if (!(value <= tolerance)) report.pass = false;
  }
  return report;
}

}  // namespace ncm
