#include "ncm/reconstruction.hpp"

#include "ncm/binomial.hpp"
#include "ncm/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ncm {

NormOracle::NormOracle(OracleInfo info, Function deviation)
    : info_(info), deviation_(std::move(deviation)) {
  if (info_.arity < 0) throw std::invalid_argument("NormOracle: negative arity");
  if (!(info_.p > 0.0)) throw std::invalid_argument("NormOracle: p must be positive");
  if (!deviation_) throw std::invalid_argument("NormOracle: empty evaluation function");
}

NormOracle NormOracle::from_norm_power(OracleInfo info, Function norm_power) {
  if (!norm_power) throw std::invalid_argument("NormOracle: empty evaluation function");
  return NormOracle(info, [f = std::move(norm_power)](std::span<const Complex> z) {
    return f(z) - 1.0;
  });
}

namespace {

void check_word_against(const StarWord& word, std::size_t family_size) {
  for (const Letter& l : word)
    if (l.index < 1 || static_cast<std::size_t>(l.index) > family_size)
      throw std::invalid_argument("word index " + std::to_string(l.index) + " out of range");
}

int common_dim(std::span<const ComplexMatrix> elements) {
  if (elements.empty()) throw std::invalid_argument("empty element family");
  const auto dim = elements.front().rows();
  for (const auto& x : elements) {
    require_square(x, "element");
    if (x.rows() != dim) throw std::invalid_argument("elements must share one dimension");
  }
  return static_cast<int>(dim);
}

void check_gadget_word(const GadgetFamily& gadget, const StarWord& word) {
  if (static_cast<int>(word.size()) != gadget.n)
    throw std::invalid_argument("word length " + std::to_string(word.size()) +
                                " does not match gadget size " + std::to_string(gadget.n));
}

}  // namespace

double admissible_radius(const GadgetFamily& gadget, std::span<const ComplexMatrix> elements,
                         const StarWord& word) {
  check_gadget_word(gadget, word);
  check_word_against(word, elements.size());
  const double n = static_cast<double>(word.size());
  double k = 0.0;
  for (std::size_t j = 0; j < word.size(); ++j) {
    const double an = operator_norm(gadget.matrices[j]);
    const double xn = operator_norm(elements[word[j].index - 1]);
    k = std::max({k, an * xn, an * an * xn * xn});
  }
  if (k == 0.0) return 1.0;
  return std::min(1.0, 1.0 / (2.0 * (n * n + 2.0 * n) * k));
}

NormOracle make_norm_oracle(const GadgetFamily& gadget, std::span<const ComplexMatrix> elements,
                            const StarWord& word, double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("make_norm_oracle: p must be finite and positive");
  check_gadget_word(gadget, word);
  check_word_against(word, elements.size());
  const int element_dim = common_dim(elements);

  auto terms = std::make_shared<std::vector<ComplexMatrix>>();
  terms->reserve(word.size());
  for (std::size_t j = 0; j < word.size(); ++j)
    terms->push_back(kron(apply_star(gadget.matrices[j], word[j].star), elements[word[j].index - 1]));

  OracleInfo info;
  info.p = p;
  info.arity = static_cast<int>(word.size());
  info.gadget_dim = gadget.dim;
  info.element_dim = element_dim;
  info.admissible_radius = admissible_radius(gadget, elements, word);

  const int total = gadget.dim * element_dim;
  return NormOracle(info, [terms, p, total](std::span<const Complex> z) {
    if (z.size() != terms->size()) throw std::invalid_argument("oracle: wrong number of variables");
    // Scratch space is per thread, so concurrent evaluation stays safe.
    thread_local ComplexMatrix t, y;
    thread_local Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
    t.setZero(total, total);
    for (std::size_t j = 0; j < z.size(); ++j)
      if (z[j] != Complex(0.0)) t += z[j] * (*terms)[j];
    // S*S - 1 = T + T* + T*T, formed without the identity.
    y = t + t.adjoint();
    y.noalias() += t.adjoint() * t;
    solver.compute(y, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& eig = solver.eigenvalues();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
      const double v = eig[i];
      sum += v > -1.0 ? std::expm1(0.5 * p * std::log1p(v)) : -1.0;
    }
    return sum / total;
  });
}

ComplexMatrix gram_deviation_coefficient(const GadgetFamily& gadget,
                                         std::span<const ComplexMatrix> elements,
                                         const StarWord& word, int k) {
  check_gadget_word(gadget, word);
  check_word_against(word, elements.size());
  if (k < 0) throw std::invalid_argument("gram_deviation_coefficient: k must be >= 0");
  const int n = gadget.n;
  if (n * k > 20)
    throw GuardExceededError("gram_deviation_coefficient: n*k = " + std::to_string(n * k) +
                             " exceeds 20");
  const int element_dim = common_dim(elements);
  const int total = gadget.dim * element_dim;
  ComplexMatrix result = ComplexMatrix::Zero(total, total);
  if (k == 0) return result;

  // Bricks that can contribute to z^e: a_j (x) y_j for every j, where
  // y_j = x^{e_j}, and a_i a_j (x) x_i^* x_j for e_i = *, e_j = 1.
  struct Brick {
    unsigned mask;
    ComplexMatrix value;
  };
  std::vector<Brick> bricks;
  for (int j = 0; j < n; ++j) {
    const ComplexMatrix y = apply_star(elements[word[j].index - 1], word[j].star);
    bricks.push_back({1u << j, kron(gadget.matrices[j], y)});
  }
  for (int i = 0; i < n; ++i) {
    if (!word[i].star) continue;
    for (int j = 0; j < n; ++j) {
      if (word[j].star) continue;
      const ComplexMatrix xi = elements[word[i].index - 1].adjoint();
      const ComplexMatrix& xj = elements[word[j].index - 1];
      bricks.push_back({(1u << i) | (1u << j),
                        kron(gadget.matrices[i] * gadget.matrices[j], xi * xj)});
    }
  }

  const unsigned full = (1u << n) - 1u;
  auto recurse = [&](auto& self, unsigned used, int depth, const ComplexMatrix& prefix) -> void {
    if (depth == k) {
      if (used == full) result += prefix;
      return;
    }
    const int remaining_vars = n - std::popcount(used);
    const int remaining_bricks = k - depth;
    // Each brick consumes one or two variables.
    if (remaining_vars < remaining_bricks || remaining_vars > 2 * remaining_bricks) return;
    for (const Brick& b : bricks) {
      if (b.mask & used) continue;
      self(self, used | b.mask, depth + 1, ComplexMatrix(prefix * b.value));
    }
  };
  recurse(recurse, 0u, 0, ComplexMatrix::Identity(total, total));
  return result;
}

Complex fourier_moment_estimate(const NormOracle& oracle, const StarWord& word, double r, int q) {
  const int n = static_cast<int>(word.size());
  if (n != oracle.arity())
    throw std::invalid_argument("fourier_moment_estimate: word length does not match oracle arity");
  if (n == 0) throw std::invalid_argument("fourier_moment_estimate: empty word");
  if (q < 3) throw std::invalid_argument("fourier_moment_estimate: q must be >= 3");
  if (!(r > 0.0)) throw std::invalid_argument("fourier_moment_estimate: r must be positive");
  if (r >= oracle.info().admissible_radius)
    throw InadmissibleRadiusError("radius " + std::to_string(r) + " is not below the admissible bound " +
                                  std::to_string(oracle.info().admissible_radius));
  const double points = std::pow(static_cast<double>(q), n);
  if (points > 5e7) throw GuardExceededError("fourier_moment_estimate: grid q^n too large");

  std::vector<Complex> roots(q);
  for (int m = 0; m < q; ++m) roots[m] = std::polar(1.0, 2.0 * std::numbers::pi * m / q);

  std::vector<int> digits(n, 0);
  std::vector<Complex> z(n, Complex(r));
  Complex sum = 0.0;
  const auto total = static_cast<long long>(points);
  for (long long idx = 0; idx < total; ++idx) {
    Complex phase = 1.0;
    for (int j = 0; j < n; ++j) {
      z[j] = r * roots[digits[j]];
      phase *= word[j].star ? roots[digits[j]] : std::conj(roots[digits[j]]);
    }
    sum += oracle.deviation(z) * phase;
    for (int j = 0; j < n; ++j) {
      if (++digits[j] < q) break;
      digits[j] = 0;
    }
  }
  const Complex estimate = sum / points / std::pow(r, n);
  if (!std::isfinite(estimate.real()) || !std::isfinite(estimate.imag()))
    throw NonConvergenceError("fourier_moment_estimate: oracle returned a non-finite value");
  return estimate;
}

bool error_is_even_in_r(int q, int n) {
  // Every surviving monomial has odd degree in each variable when q is even,
  // so the estimate is an even function of r. For odd q the first aliased
  // term carries relative degree q - n - 1 >= n + 2.
  return q % 2 == 0 || q >= 2 * n + 3;
}

ExtrapolationPlan ExtrapolationPlan::default_for(const OracleInfo& info) {
  ExtrapolationPlan plan;
  plan.q = 2 * info.arity + 3;
  const double r0 = std::min(info.admissible_radius, 1.0) / 2.0;
  plan.radii = {r0, r0 / 2.0, r0 / 4.0, r0 / 8.0};
  plan.richardson_order = 2;
  return plan;
}

std::pair<Complex, double> richardson_limit(std::span<const double> h,
                                            std::span<const Complex> values, int order) {
  const std::size_t count = values.size();
  if (count != h.size() || count < 2)
    throw std::invalid_argument("richardson_limit: need at least two matching samples");
  if (order < 0 || static_cast<std::size_t>(order) + 1 > count)
    throw std::invalid_argument("richardson_limit: order needs order + 1 samples");
  // table[i][j]: extrapolation of samples i-j..i eliminating j powers of h.
  std::vector<std::vector<Complex>> table(count);
  for (std::size_t i = 0; i < count; ++i) {
    table[i].assign(static_cast<std::size_t>(order) + 1, Complex(0.0));
    table[i][0] = values[i];
    for (std::size_t j = 1; j <= std::min<std::size_t>(i, order); ++j) {
      const double ratio = h[i - j] / h[i];
      table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (ratio - 1.0);
    }
  }
  const std::size_t last = count - 1;
  const Complex limit = table[last][order];
  double residual = 0.0;
  if (last >= static_cast<std::size_t>(order) + 1)
    residual = std::abs(limit - table[last - 1][order]);
  else
    residual = std::abs(limit - table[last][order - 1]);
  return {limit, residual};
}

MomentEstimate extrapolated_moment(const NormOracle& oracle, const StarWord& word, double p,
                                   const ExtrapolationPlan& plan) {
  const int n = static_cast<int>(word.size());
  if (n == 0) throw std::invalid_argument("extrapolated_moment: empty word");
  if (std::abs(p - oracle.info().p) > 1e-14 * std::max(1.0, p))
    throw std::invalid_argument("extrapolated_moment: p does not match the oracle");
  if (plan.q < 3) throw std::invalid_argument("extrapolation plan: q must be >= 3");
  if (plan.radii.size() < 2 || plan.radii.size() < static_cast<std::size_t>(plan.richardson_order) + 1)
    throw std::invalid_argument("extrapolation plan: too few radii for the Richardson order");
  for (std::size_t i = 0; i < plan.radii.size(); ++i) {
    if (!(plan.radii[i] > 0.0)) throw std::invalid_argument("extrapolation plan: radii must be positive");
    if (i && !(plan.radii[i] < plan.radii[i - 1]))
      throw std::invalid_argument("extrapolation plan: radii must be strictly decreasing");
  }

  const int alpha = alpha_count(star_pattern(word));
  const double coefficient = moment_coefficient(MomentCoefficientQuery::make(p, n, alpha));
  if (std::abs(coefficient) <= 1e-12)
    throw ZeroCoefficientError("moment coefficient C(p=" + std::to_string(p) + ", N=" +
                               std::to_string(n) + ", alpha=" + std::to_string(alpha) +
                               ") vanishes; the moment is not recoverable at this p");

  MomentEstimate out;
  out.coefficient = coefficient;
  std::vector<double> h;
  const double power = error_is_even_in_r(plan.q, n) ? 2.0 : 1.0;
  for (double r : plan.radii) {
    out.raw.push_back(fourier_moment_estimate(oracle, word, r, plan.q));
    h.push_back(std::pow(r, power));
  }
  const auto [limit, residual] = richardson_limit(h, out.raw, plan.richardson_order);
  out.value = limit / coefficient;
  out.residual = residual / std::abs(coefficient);
  if (!(out.residual <= plan.tolerance))
    throw NonConvergenceError("extrapolated_moment: residual " + std::to_string(out.residual) +
                              " exceeds tolerance " + std::to_string(plan.tolerance));
  return out;
}

Reconstruction reconstruct_word_trace(std::span<const ComplexMatrix> family, const StarWord& word,
                                      double p, const ReconstructOptions& options) {
  if (word.empty()) return {Complex(1.0), 0.0, 1.0};
  check_word_against(word, family.size());
  common_dim(family);

  std::vector<ComplexMatrix> scaled(family.begin(), family.end());
  std::vector<double> factor(family.size(), 1.0);
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    const double norm = operator_norm(scaled[i]);
    if (norm > 0.0) {
      factor[i] = norm;
      scaled[i] /= norm;
    }
  }
  double scale = 1.0;
  for (const Letter& l : word) scale *= factor[l.index - 1];

  const GadgetFamily gadget = compact_family(static_cast<int>(word.size()));
  const NormOracle oracle = make_norm_oracle(gadget, scaled, word, p);
  ExtrapolationPlan plan = ExtrapolationPlan::default_for(oracle.info());
  if (options.q) plan.q = *options.q;
  if (options.radii) {
    plan.radii = *options.radii;
  } else if (options.radius_fraction) {
    const double f = *options.radius_fraction;
    if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("reconstruct: radius_fraction must lie in (0, 1)");
    const double r0 = std::min(oracle.info().admissible_radius, 1.0) * f;
    plan.radii = {r0, r0 / 2.0, r0 / 4.0, r0 / 8.0};
  }
  plan.richardson_order = options.richardson_order;
  plan.tolerance = options.tolerance;

  const MomentEstimate est = extrapolated_moment(oracle, word, p, plan);
  return {est.value * scale, est.residual * scale, scale};
}

}  // namespace ncm
