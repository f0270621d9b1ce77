#include "ncm/corner_norms.hpp"

#include "ncm/binomial.hpp"
#include "ncm/errors.hpp"
#include "ncm/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ncm {

namespace {

void require_positive_p(double p, const char* what) {
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument(std::string(what) + ": p must be positive");
}

}  // namespace

double psi_eval(double t, double p) {
  require_positive_p(p, "psi_eval");
  if (!(t >= 0.0)) throw std::invalid_argument("psi_eval: t must be >= 0");
  if (t == 0.0) return 2.0;
  const double s = std::sqrt(t * t + 4.0 * t);
  const double big = 1.0 + (t + s) / 2.0;
  // 1 + (t - s)/2 = 4t / (t + s)^2, written without the cancellation.
  const double small = std::max(0.0, 4.0 * t / ((t + s) * (t + s)));
  return std::pow(big, p / 2.0) + std::pow(small, p / 2.0);
}

double PsiSeries::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + *it;
  return acc;
}

PsiSeries psi_series(double p, int N) {
  require_positive_p(p, "psi_series");
  if (N < 0) throw std::invalid_argument("psi_series: N must be >= 0");
  PsiSeries out;
  out.p = p;
  out.coefficients.resize(static_cast<std::size_t>(N) + 1);
  const double q = p * p / 4.0;
  double lambda = 2.0;
  for (int n = 0; n <= N; ++n) {
    out.coefficients[n] = lambda;
    lambda *= (q - static_cast<double>(n) * n) / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
  }
  return out;
}

std::pair<double, int> psi_series_adaptive(double t, double p, double tol, int max_terms) {
  require_positive_p(p, "psi_series_adaptive");
  if (!(std::abs(t) < 4.0)) throw std::invalid_argument("psi_series_adaptive: |t| must be < 4");
  const double q = p * p / 4.0;
  double lambda = 2.0;
  double power = 1.0;
  double sum = 0.0;
  double compensation = 0.0;
  int quiet = 0;
  int n = 0;
  for (; n < max_terms; ++n) {
    const double term = lambda * power;
    // Neumaier summation.
    const double next = sum + term;
    compensation += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
    sum = next;
    quiet = std::abs(term) <= tol * std::max(std::abs(sum), std::numeric_limits<double>::min()) ? quiet + 1 : 0;
    if (quiet >= 3) break;
    lambda *= (q - static_cast<double>(n) * n) / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    power *= t;
  }
  return {sum + compensation, n + 1};
}

double psi_tail_sign(double t, double p, int N) {
  if (!(t > 0.0)) throw std::invalid_argument("psi_tail_sign: t must be > 0");
  return psi_eval(t, p) - psi_series(p, N)(t);
}

bool psi_tail_nonnegative(double p, int N) {
  if (p >= 2.0 * N) return true;
  const auto f = static_cast<long long>(std::floor(N - p / 2.0));
  return f % 2 != 0;
}

namespace {

/// psi(t) = 2 cosh(c log b(t)) with c = p/2, b(t) = 1 + (t + s)/2, since the two
/// bases multiply to 1. psi(t + dt) - psi(t) via sinh products, free of cancellation.
double psi_step(double t, double dt, double p) {
  const double c = p / 2.0;
  const double s0 = std::sqrt(t * t + 4.0 * t);
  const double t1 = t + dt;
  const double s1 = std::sqrt(t1 * t1 + 4.0 * t1);
  const double b0 = 1.0 + (t + s0) / 2.0;
  const double ds = (2.0 * t * dt + dt * dt + 4.0 * dt) / (s0 + s1);
  const double dlog = std::log1p((dt + ds) / 2.0 / b0);
  const double l0 = std::log(b0);
  return 4.0 * std::sinh(c * (l0 + dlog / 2.0)) * std::sinh(c * dlog / 2.0);
}

}  // namespace

double psi_ode_residual(double t, double p) {
  require_positive_p(p, "psi_ode_residual");
  const double h = 1e-4 * std::max(t, 1.0);
  if (!(t - h >= 0.0)) throw std::invalid_argument("psi_ode_residual: t too close to 0 for the stencil");
  const double f0 = psi_eval(t, p);
  const double up = psi_step(t, h, p);          // psi(t+h) - psi(t)
  const double down = -psi_step(t, -h, p);      // psi(t) - psi(t-h)
  const double d1 = (up + down) / (2.0 * h);
  const double d2 = (up - down) / (h * h);
  return (t * t + 4.0 * t) * d2 + (t + 2.0) * d1 - (p * p / 4.0) * f0;
}

TailPositivityReport tail_positivity_check(double p, int N, std::span<const double> grid, double floor) {
  if (grid.empty()) throw std::invalid_argument("tail_positivity_check: empty grid");
  TailPositivityReport out;
  out.t0 = grid.front();
  const PsiSeries series = psi_series(p, N);
  auto tail = [&](double t) { return psi_eval(t, p) - series(t); };
  const double sign = tail(out.t0) >= 0.0 ? 1.0 : -1.0;
  const double h = 1e-6 * std::max(out.t0, 1e-3);
  out.first_slope = sign * (tail(out.t0 + h) - tail(out.t0)) / h;
  out.min_value = std::numeric_limits<double>::infinity();
  for (double t : grid) out.min_value = std::min(out.min_value, sign * tail(t));
  out.pass = out.min_value > -floor;
  return out;
}

std::vector<std::int64_t> cycle_polynomial_P(int m) {
  if (m < 1) throw std::invalid_argument("cycle_polynomial_P: m must be >= 1");
  std::vector<std::int64_t> prev{0, 1};     // P_1
  std::vector<std::int64_t> cur{0, 2, 1};   // P_2
  if (m == 1) return prev;
  for (int k = 3; k <= m; ++k) {
    std::vector<std::int64_t> next(cur.size() + 1, 0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      std::int64_t s = cur[i];
      if (i < prev.size() && __builtin_add_overflow(s, prev[i], &s))
        throw GuardExceededError("cycle_polynomial_P: coefficients overflow 64 bits");
      next[i + 1] = s;
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

double evaluate_cycle_polynomial(int m, double x) {
  const auto c = cycle_polynomial_P(m);
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + static_cast<double>(*it);
  return acc;
}

ComplexMatrix evaluate_cycle_polynomial(int m, const ComplexMatrix& x) {
  require_square(x, "cycle polynomial argument");
  const auto c = cycle_polynomial_P(m);
  const auto d = x.rows();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    acc = acc * x;
    acc.diagonal().array() += static_cast<double>(*it);
  }
  return acc;
}

double cycle_polynomial_closed_form(int m, double x) {
  if (m < 1) throw std::invalid_argument("cycle_polynomial_closed_form: m must be >= 1");
  if (!(x >= 0.0)) throw std::invalid_argument("cycle_polynomial_closed_form: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double s = std::sqrt(x * x + 4.0 * x);
  const double plus = (x + s) / 2.0;
  const double minus = -2.0 * x / (x + s);
  return std::pow(plus, m) + std::pow(minus, m);
}

ComplexMatrix corner_embed(const ComplexMatrix& x) {
  require_square(x, "corner_embed input");
  const auto d = x.rows();
  ComplexMatrix out = ComplexMatrix::Zero(2 * d, 2 * d);
  out.topRightCorner(d, d) = x;
  return out;
}

std::array<ComplexMatrix, 4> square_zero_quartet(const ComplexMatrix& a) {
  require_square(a, "square_zero_quartet input");
  const ComplexMatrix as = a.adjoint();
  const ComplexMatrix lin = a + as;
  return {as * a + lin, as * a - lin, a * as + lin, a * as - lin};
}

ComplexMatrix four_term_sum(const ComplexMatrix& a, double p) {
  require_square(a, "four_term_sum input");
  require_positive_p(p, "four_term_sum");
  const auto d = a.rows();
  const ComplexMatrix one = ComplexMatrix::Identity(d, d);
  const ComplexMatrix as = a.adjoint();
  return abs_power(one + a, p) + abs_power(one - a, p) + abs_power(one + as, p) + abs_power(one - as, p);
}

double four_term_defect(const ComplexMatrix& a, double p) {
  ComplexMatrix s = four_term_sum(a, p);
  s.diagonal().array() -= 4.0;
  return hermitian_eigenvalues(s).minCoeff();
}

NormPairOracle make_norm_pair_oracle(const ComplexMatrix& a, double p) {
  require_square(a, "norm pair oracle input");
  require_positive_p(p, "make_norm_pair_oracle");
  return [a, p](double t) {
    const ComplexMatrix one = ComplexMatrix::Identity(a.rows(), a.cols());
    return std::pair{schatten_p_power(one + t * a, p), schatten_p_power(one - t * a, p)};
  };
}

EvenNormRecovery recover_even_norm(const NormPairOracle& oracle, double p, int N,
                                   std::span<const double> lower_norms, double norm_bound,
                                   const EvenNormOptions& options) {
  require_positive_p(p, "recover_even_norm");
  if (N < 1) throw std::invalid_argument("recover_even_norm: N must be >= 1");
  if (lower_norms.size() + 1 < static_cast<std::size_t>(N))
    throw std::invalid_argument("recover_even_norm: need the norms of orders 2..2(N-1)");
  if (!(norm_bound >= 0.0)) throw std::invalid_argument("recover_even_norm: norm bound must be >= 0");
  for (int k = 0; k < N; ++k)
    if (std::abs(p / 2.0 - k) <= 1e-12 * std::max(1.0, p))
      throw LambdaZeroError("lambda_" + std::to_string(N) + " vanishes at p = " + std::to_string(p));

  EvenNormRecovery out;
  if (norm_bound == 0.0) return out;

  const PsiSeries lambda = psi_series(p, N);
  const double t0 = std::sqrt(0.1) / norm_bound;
  out.ladder = {t0, t0 / 2.0, t0 / 4.0, t0 / 8.0};
  std::vector<double> h;
  std::vector<Complex> values;
  for (double t : out.ladder) {
    const auto [plus, minus] = oracle(t);
    double lower = 0.0;
    for (int n = 1; n < N; ++n) lower += lambda.coefficients[n] * std::pow(t, 2 * n) * lower_norms[n - 1];
    const double numerator = plus + minus - 2.0 - 2.0 * lower;
    values.emplace_back(numerator / (2.0 * lambda.coefficients[N] * std::pow(t, 2 * N)));
    h.push_back(t * t);
  }
  const auto [limit, residual] = richardson_limit(h, values, options.richardson_order);
  out.value = limit.real();
  out.residual = residual;
  if (!(residual <= options.tolerance * std::max(1.0, std::abs(out.value))))
    throw NonConvergenceError("recover_even_norm: residual " + std::to_string(residual) + " exceeds tolerance");
  return out;
}

EvenNormRecovery recover_even_norm(const ComplexMatrix& a, double p, int N, const EvenNormOptions& options) {
  require_square(a, "recover_even_norm input");
  std::vector<double> lower;
  for (int n = 1; n < N; ++n) lower.push_back(schatten_p_power(a, 2.0 * n));
  return recover_even_norm(make_norm_pair_oracle(a, p), p, N, lower, operator_norm(a), options);
}

double truncation_remainder(const ComplexMatrix& x, double p, int n, double r) {
  require_square(x, "truncation_remainder input");
  require_positive_p(p, "truncation_remainder");
  if (n < 0) throw std::invalid_argument("truncation_remainder: n must be >= 0");
  if (!(r > 0.0)) throw std::invalid_argument("truncation_remainder: r must be positive");
  const auto d = x.rows();
  const ComplexMatrix zero = ComplexMatrix::Zero(d, d);
  const ComplexMatrix one = ComplexMatrix::Identity(d, d);

  // Polynomials in r with matrix coefficients, truncated above degree n.
  using Poly = std::vector<ComplexMatrix>;
  Poly y(static_cast<std::size_t>(n) + 1, zero);
  if (n >= 1) y[1] = x + x.adjoint();
  if (n >= 2) y[2] = x.adjoint() * x;

  Poly power(static_cast<std::size_t>(n) + 1, zero);
  power[0] = one;
  Poly q = power;  // binom(p/2, 0) Y^0
  for (int j = 1; j <= n; ++j) {
    Poly next(static_cast<std::size_t>(n) + 1, zero);
    for (int a = 0; a <= n; ++a)
      for (int b = 1; a + b <= n; ++b) next[a + b] += power[a] * y[b];
    power = std::move(next);
    const double c = generalized_binomial(p / 2.0, j);
    for (int k = 0; k <= n; ++k) q[k] += c * power[k];
  }

  ComplexMatrix truncated = zero;
  for (int k = n; k >= 0; --k) truncated = truncated * r + q[k];
  const ComplexMatrix exact = abs_power(one + r * x, p);
  return operator_norm(exact - truncated) / std::pow(r, n);
}

}  // namespace ncm
