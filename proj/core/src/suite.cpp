#include "ncm/suite.hpp"

#include "ncm/binomial.hpp"
#include "ncm/corner_norms.hpp"
#include "ncm/distribution.hpp"
#include "ncm/errors.hpp"
#include "ncm/even_p.hpp"
#include "ncm/gadgets.hpp"
#include "ncm/matrix.hpp"
#include "ncm/random.hpp"
#include "ncm/reconstruction.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace ncm {

std::uint64_t default_seed() {
  const char* raw = std::getenv(kSeedEnvVar);
  if (raw == nullptr || *raw == '\0') return kDefaultSeed;
  const std::string text(raw);
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError(std::string(kSeedEnvVar) + " is not an unsigned integer: " + text);
  return value;
}

namespace {

struct ModuleGuard {
  const char* name;
  int default_cap;
  int max_cap;
};

// What the cap bounds: matrix dimension, gadget size, N, or m.
constexpr ModuleGuard kModules[] = {
    {"core-algebra", 4, 16},        {"gadget-matrices", 8, 9},   {"binomial-combinatorics", 10, 12},
    {"moment-reconstruction", 2, 4}, {"star-distribution", 2, 4}, {"corner-norms", 3, 6},
    {"even-p-expansion", 2, 3},
};

const ModuleGuard* find_module(const std::string& name) {
  for (const auto& m : kModules)
    if (name == m.name) return &m;
  return nullptr;
}

/// FNV-1a; gives each check its own generator stream independent of selection.
std::uint64_t stream_of(const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct Context {
  const SuiteConfig& config;
  int cap;
  Rng rng;
};

struct Outcome {
  double measured;
  std::string detail;
};

using CheckFn = std::function<Outcome(Context&)>;

struct Check {
  CheckInfo info;
  CheckFn run;
};

std::vector<double> grid(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

// ---- core-algebra ----------------------------------------------------------

Outcome tracial_property(Context& c) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % c.cap;
    const ComplexMatrix a = random_gaussian(d, c.rng);
    const ComplexMatrix b = random_gaussian(d, c.rng);
    const double scale = operator_norm(a) * operator_norm(b) * d;
    worst = std::max(worst, std::abs(normalized_trace(a * b) - normalized_trace(b * a)) / scale);
  }
  return {worst, "20 random pairs"};
}

Outcome singular_adjoint(Context& c) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % c.cap;
    const ComplexMatrix t = random_gaussian(d, c.rng);
    const auto mu = singular_profile(t).values;
    const auto mu_adj = singular_profile(t.adjoint()).values;
    const auto mu_abs = singular_profile(abs_power(t, 1.0)).values;
    for (int k = 0; k < d; ++k)
      worst = std::max({worst, std::abs(mu[k] - mu_adj[k]), std::abs(mu[k] - mu_abs[k])});
  }
  return {worst, "mu_t(T) against mu_t(T*) and mu_t(|T|)"};
}

template <typename Combine, typename Bound>
double singular_violation(Context& c, Combine combine, Bound bound) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % std::max(1, c.cap - 1);
    const ComplexMatrix t = random_gaussian(d, c.rng);
    const ComplexMatrix s = random_gaussian(d, c.rng);
    const SingularProfile pt = singular_profile(t);
    const SingularProfile ps = singular_profile(s);
    const SingularProfile pc = singular_profile(combine(t, s));
    for (int i = 0; i < d; ++i)
      for (int j = 0; i + j < d; ++j) {
        const double ti = static_cast<double>(i) / d;
        const double sj = static_cast<double>(j) / d;
        worst = std::max(worst, pc.at(ti + sj) - bound(pt.at(ti), ps.at(sj)));
      }
  }
  return std::max(0.0, worst);
}

Outcome singular_add(Context& c) {
  return {singular_violation(
              c, [](const ComplexMatrix& t, const ComplexMatrix& s) { return ComplexMatrix(t + s); },
              [](double a, double b) { return a + b; }),
          "largest excess of mu_{t+s}(T+S) over mu_t(T) + mu_s(S)"};
}

Outcome singular_mult(Context& c) {
  return {singular_violation(
              c, [](const ComplexMatrix& t, const ComplexMatrix& s) { return ComplexMatrix(t * s); },
              [](double a, double b) { return a * b; }),
          "largest excess of mu_{t+s}(TS) over mu_t(T) mu_s(S)"};
}

// ---- gadget-matrices ------------------------------------------------------

Outcome gadget_check(Context& c, GadgetFamily (*make)(int)) {
  double worst = 0.0;
  int worst_n = 1;
  for (int n = 1; n <= c.cap; ++n) {
    const CyclicTraceReport r = verify_cyclic_trace(make(n));
    if (r.max_deviation >= worst) {
      worst = r.max_deviation;
      worst_n = n;
    }
  }
  return {worst, "exhaustive for n <= " + std::to_string(c.cap) + "; worst at n = " + std::to_string(worst_n)};
}

// ---- binomial-combinatorics -------------------------------------------------

Outcome closed_form_coefficients(Context&) {
  double worst = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double p = 8.0 * i / 100.0;
    const double c2 = moment_coefficient(MomentCoefficientQuery::make(p, 2, 1));
    const double c4 = moment_coefficient(MomentCoefficientQuery::make(p, 4, 1));
    worst = std::max(worst, std::abs(c2 - p * p / 4.0));
    worst = std::max(worst, std::abs(c4 - p * p * (p / 2 - 1) * (p / 2 - 2) / 24.0));
  }
  return {worst, "C(p,2,1) and C(p,4,1) on 100 points of (0, 8]"};
}

Outcome root_report(Context& c) {
  double worst = 0.0;
  for (int n = 1; n <= c.cap; ++n)
    for (int alpha = 0; 2 * alpha <= n; ++alpha) {
      const RootReport r = coefficient_root_report(n, alpha);
      for (double v : r.abs_values) worst = std::max(worst, v);
    }
  return {worst, "largest |P| at the predicted integer roots"};
}

Outcome nonvanishing(Context& c) {
  double smallest = std::numeric_limits<double>::infinity();
  for (double p : {0.5, 1.0, 1.5, 3.0, std::numbers::pi, 5.5})
    for (int n = 1; n <= c.cap; ++n)
      for (int alpha = 0; 2 * alpha <= n; ++alpha)
        smallest = std::min(smallest, std::abs(moment_coefficient(MomentCoefficientQuery::make(p, n, alpha))));
  return {smallest, "smallest |C(p, N, alpha)| over the non-even sample"};
}

Outcome elementary_identity(Context&) {
  int mismatches = 0;
  for (int n = 0; n <= 10; ++n)
    for (int alpha = 0; alpha <= n; ++alpha)
      for (int k = 0; k <= n; ++k) {
        const Rational a(alpha);
        const Rational lhs = a * generalized_binomial(Rational(alpha - 1), n - k) +
                             Rational(n - alpha) * generalized_binomial(a, n - k);
        const Rational rhs = Rational(k) * generalized_binomial(a, n - k);
        if (lhs != rhs) ++mismatches;
      }
  return {static_cast<double>(mismatches), "exact rational mismatches"};
}

// ---- moment-reconstruction ---------------------------------------------------

StarWord random_word(int n, int family_size, Rng& rng) {
  std::uniform_int_distribution<int> pick(1, family_size);
  std::bernoulli_distribution star(0.5);
  StarWord w;
  for (int j = 0; j < n; ++j) w.push_back({pick(rng), star(rng)});
  return w;
}

Outcome combinatorial_lemma(Context& c) {
  double worst = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 4;
    std::vector<ComplexMatrix> family{random_gaussian(c.cap, c.rng), random_gaussian(c.cap, c.rng)};
    const StarWord word = random_word(n, 2, c.rng);
    const GadgetFamily gadget = compact_family(n);
    const int alpha = alpha_count(star_pattern(word));
    const Complex tau = word_trace(family, word);
    for (int k = 0; k <= n; ++k) {
      const Complex got = normalized_trace(gram_deviation_coefficient(gadget, family, word, k));
      const double expected_factor = k * generalized_binomial(static_cast<double>(alpha), n - k);
      worst = std::max(worst, std::abs(got - tau * expected_factor));
    }
  }
  return {worst, "exact coefficient of z^e in (S*S - 1)^k"};
}

Outcome word_traces(Context& c) {
  double worst = 0.0;
  int count = 0;
  for (double p : c.config.p_grid)
    for (int n = 1; n <= 3; ++n) {
      std::vector<ComplexMatrix> family{random_with_norm(c.cap, 1.0, c.rng), random_with_norm(c.cap, 1.0, c.rng)};
      const StarWord word = random_word(n, 2, c.rng);
      const Reconstruction rec = reconstruct_word_trace(family, word, p);
      worst = std::max(worst, std::abs(rec.estimate - word_trace(family, word)));
      ++count;
    }
  return {worst, std::to_string(count) + " reconstructions over the p grid"};
}

// ---- star-distribution -------------------------------------------------------

std::vector<ComplexMatrix> random_family(int count, int dim, Rng& rng) {
  std::vector<ComplexMatrix> out;
  for (int i = 0; i < count; ++i) out.push_back(random_with_norm(dim, 1.0, rng));
  return out;
}

Outcome conjugation_tables(Context& c) {
  const auto family = random_family(2, c.cap, c.rng);
  const ComplexMatrix u = random_unitary(c.cap, c.rng);
  std::vector<ComplexMatrix> image;
  for (const auto& x : family) image.push_back(u * x * u.adjoint());
  const auto cmp = distributions_match(star_moments(family, 4), star_moments(image, 4), 0.0);
  return {cmp.worst_gap, "worst word " + to_string(cmp.worst_word)};
}

Outcome reconstructed_tables(Context& c) {
  const auto family = random_family(2, c.cap, c.rng);
  const ComplexMatrix u = random_unitary(c.cap, c.rng);
  std::vector<ComplexMatrix> image;
  for (const auto& x : family) image.push_back(u * x * u.adjoint());
  ReconstructOptions options;
  options.q = 4;
  const double p = 3.0;
  const auto a = reconstructed_moments(family, 3, p, options);
  const auto b = reconstructed_moments(image, 3, p, options);
  const auto cmp = distributions_match(a.table, b.table, 0.0);
  return {cmp.worst_gap, "p = 3, degree <= 3, worst word " + to_string(cmp.worst_word)};
}

Outcome transposition_level(Context& c, int level) {
  const SpanMap t = SpanMap::transposition(2);
  const auto seed = c.config.seed;
  const IsometryProbeReport r = complete_isometry_probe(t, level, 3.0, level == 1 ? 200 : 100, seed);
  return {r.max_gap, "p = 3, level " + std::to_string(level) + ", " + std::to_string(r.trials) + " trials"};
}

std::vector<ComplexMatrix> full_basis(int d) {
  std::vector<ComplexMatrix> basis;
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) basis.push_back(elementary(d, i, j));
  return basis;
}

Outcome multiplicativity_conjugation(Context& c) {
  const SpanMap u = SpanMap::conjugation(full_basis(c.cap), random_unitary(c.cap, c.rng), true);
  double worst = 0.0;
  for (int a = 0; a < u.size(); ++a)
    for (int b = 0; b < u.size(); ++b) worst = std::max(worst, multiplicativity_defect(u, a, b, 3.0, false));
  return {worst, "all basis pairs of M_" + std::to_string(c.cap)};
}

Outcome multiplicativity_counterexample(Context&) {
  std::vector<ComplexMatrix> basis{elementary(2, 1, 2), elementary(2, 2, 1), elementary(2, 1, 1),
                                   elementary(2, 2, 2)};
  std::vector<ComplexMatrix> images = basis;
  images[0] = 2.0 * elementary(2, 1, 2);
  const SpanMap u(basis, images, true);
  return {multiplicativity_defect(u, 0, 1, 3.0, false), "u(e12) = 2 e12, a = e12, b = e21"};
}

Outcome adjoint_conjugation(Context& c) {
  const SpanMap u = SpanMap::conjugation(full_basis(c.cap), random_unitary(c.cap, c.rng), true);
  double worst = 0.0;
  for (int x = 0; x < u.size(); ++x) worst = std::max(worst, adjoint_defect(u, x));
  return {worst, "all basis elements of M_" + std::to_string(c.cap)};
}

Outcome linearization(Context& c) {
  std::vector<ComplexMatrix> x{random_hermitian(c.cap, c.rng), random_hermitian(c.cap, c.rng)};
  const ComplexMatrix u = random_unitary(c.cap, c.rng);
  std::vector<ComplexMatrix> y;
  for (const auto& h : x) y.push_back(u * h * u.adjoint());
  const LinearizationReport r = selfadjoint_linearization_check(x, y, 4, 1e-10, c.config.seed);
  return {std::max(r.worst_gap, r.extraction_error), std::to_string(r.words_checked) + " words"};
}

Outcome jordan_identity(Context& c) {
  const int d = c.cap;
  const ComplexMatrix u = random_unitary(d, c.rng);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = random_gaussian(d, c.rng);
    const ComplexMatrix b = random_gaussian(d, c.rng);
    auto image = [&](const ComplexMatrix& x) { return ComplexMatrix(u * x * u.adjoint()); };
    worst = std::max(worst, normalized_hs_norm(image(a * b + b * a) - image(a) * image(b) - image(b) * image(a)));
  }
  return {worst, "x -> U x U* on all of M_" + std::to_string(d)};
}

// ---- corner-norms -------------------------------------------------------------

Outcome psi_ode(Context& c) {
  double worst = 0.0;
  for (double p : c.config.p_grid)
    for (int i = 0; i < 200; ++i) {
      const double t = 1e-3 * std::pow(5e4, i / 199.0);
      worst = std::max(worst, std::abs(psi_ode_residual(t, p)) / (1.0 + psi_eval(t, p)));
    }
  return {worst, "log grid on [1e-3, 50]"};
}

Outcome psi_series_agreement(Context& c) {
  double worst = 0.0;
  for (double p : c.config.p_grid)
    for (double t : grid(0.0, 3.5, 71)) worst = std::max(worst, std::abs(psi_eval(t, p) - psi_series_adaptive(t, p).first));
  return {worst, "adaptive truncation on [0, 3.5]"};
}

Outcome psi_sign_rule(Context&) {
  double worst = 0.0;
  for (double p : {0.5, 1.0, 3.0, 5.0})
    for (int N = 1; N <= 4; ++N) {
      const bool nonneg = psi_tail_nonnegative(p, N);
      for (int i = 1; i <= 200; ++i) {
        const double r = psi_tail_sign(0.5 * i, p, N);
        worst = std::max(worst, nonneg ? -r : r);
      }
    }
  return {std::max(0.0, worst), "largest residual of the wrong sign"};
}

Outcome tail_positivity(Context&) {
  double worst = 0.0;
  const auto g = grid(0.05, 100.0, 400);
  for (double p : {0.5, 1.0, 3.0, 5.0})
    for (int N = 1; N <= 4; ++N) {
      const TailPositivityReport r = tail_positivity_check(p, N, g);
      if (r.first_slope > 0.0) worst = std::max(worst, -r.min_value);
    }
  return {std::max(0.0, worst), "sign-normalized tail minimum on (0, 100]"};
}

Outcome cycle_closed_form(Context&) {
  double worst = 0.0;
  for (int m = 1; m <= 12; ++m)
    for (double x : grid(0.0, 5.0, 20)) {
      const double closed = cycle_polynomial_closed_form(m, x);
      worst = std::max(worst, std::abs(evaluate_cycle_polynomial(m, x) - closed) / std::max(1.0, std::abs(closed)));
    }
  return {worst, "relative gap, m <= 12"};
}

Outcome sum_of_powers(Context& c) {
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix a = corner_embed(random_with_norm(c.cap, 1.0, c.rng));
    const auto quartet = square_zero_quartet(a);
    const ComplexMatrix ata = a.adjoint() * a;
    const ComplexMatrix aat = a * a.adjoint();
    for (int m = 1; m <= 6; ++m) {
      ComplexMatrix lhs = ComplexMatrix::Zero(a.rows(), a.cols());
      for (const auto& q : quartet) {
        ComplexMatrix power = q;
        for (int e = 1; e < m; ++e) power = power * q;
        lhs += power;
      }
      const ComplexMatrix rhs = 2.0 * evaluate_cycle_polynomial(m, ata) + 2.0 * evaluate_cycle_polynomial(m, aat);
      worst = std::max(worst, operator_norm(lhs - rhs));
    }
  }
  return {worst, "m <= 6 on corner embeddings"};
}

Outcome four_function_identity(Context& c) {
  double worst = 0.0;
  for (double p : {0.3, 0.5, 0.8}) {
    const ComplexMatrix a = corner_embed(random_with_norm(c.cap, 1.0, c.rng));
    ComplexMatrix rhs = 2.0 * hermitian_apply(a.adjoint() * a, [p](double t) { return psi_eval(std::max(t, 0.0), p); }) +
                        2.0 * hermitian_apply(a * a.adjoint(), [p](double t) { return psi_eval(std::max(t, 0.0), p); });
    rhs.diagonal().array() -= 4.0;
    worst = std::max(worst, operator_norm(four_term_sum(a, p) - rhs));
  }
  return {worst, "square-zero a, p < 1"};
}

Outcome even_norm_recovery(Context& c) {
  double worst = 0.0;
  for (int N : {1, 2})
    for (double p : {1.0, 3.0})
      for (int trial = 0; trial < 3; ++trial) {
        const ComplexMatrix a = corner_embed(random_gaussian(2 + trial % 2, c.rng));
        const double direct = schatten_p_power(a, 2.0 * N);
        const double got = recover_even_norm(a, p, N).value;
        worst = std::max(worst, std::abs(got - direct) / direct);
      }
  return {worst, "relative error, N in {1, 2}, p in {1, 3}"};
}

Outcome four_term_inequality(Context& c) {
  double worst = 0.0;
  for (double p : c.config.p_grid) {
    if (p < 1.0) continue;
    for (int trial = 0; trial < 20; ++trial) {
      const ComplexMatrix a = random_gaussian(2 + trial % std::max(1, c.cap - 1), c.rng);
      worst = std::max(worst, -four_term_defect(a, p));
    }
  }
  return {std::max(0.0, worst), "largest negative part of the minimum eigenvalue"};
}

Outcome four_term_counterexample(Context&) {
  const ComplexMatrix one = ComplexMatrix::Identity(1, 1);
  return {std::abs(four_term_defect(one, 0.5) - (std::pow(2.0, 1.5) - 4.0)), "A = [1], p = 1/2"};
}

Outcome truncation_order(Context& c) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix x = random_gaussian(2, c.rng);
    for (double r : {1e-2, 5e-3})
      worst = std::max(worst, truncation_remainder(x, 3.0, 2, r / 2) / truncation_remainder(x, 3.0, 2, r));
  }
  return {worst, "largest remainder ratio for r -> r/2"};
}

// ---- even-p-expansion -----------------------------------------------------------

Outcome even_expansion(Context& c) {
  double worst = 0.0;
  for (int m = 1; m <= c.cap; ++m)
    for (int trial = 0; trial < 5; ++trial) {
      const int count = m == 3 ? 1 : 2;
      const auto a = random_family(count, 2, c.rng);
      const auto x = random_family(count, 2, c.rng);
      const double direct = direct_even_norm(a, x, m);
      worst = std::max(worst, std::abs(expand_even_norm(a, x, m) - direct) / std::max(1.0, direct));
    }
  return {worst, "m <= " + std::to_string(c.cap)};
}

Outcome even_transfer_conjugation(Context& c) {
  const auto x = random_family(2, 2, c.rng);
  const ComplexMatrix u = random_unitary(2, c.rng);
  std::vector<ComplexMatrix> y;
  for (const auto& e : x) y.push_back(u * e * u.adjoint());
  const std::vector<int> levels{1, 2, 3};
  const EvenTransferReport r = even_p_transfer_check(x, y, c.cap, levels, 5, c.config.seed);
  return {r.max_gap, r.formulation};
}

Outcome even_transposition_precondition(Context&) {
  const ComplexMatrix x = elementary(2, 1, 2) + 2.0 * elementary(2, 2, 1);
  const std::vector<ComplexMatrix> xs{x, elementary(2, 1, 1)};
  const std::vector<ComplexMatrix> ys{x.transpose(), elementary(2, 1, 1)};
  const std::vector<int> levels{1};
  try {
    even_p_transfer_check(xs, ys, 2, levels, 1, 0);
  } catch (const PreconditionFailedError& e) {
    const StarWord w = parse_word(e.detail());
    return {std::abs(word_trace(xs, w) - word_trace(ys, w)), "violating word " + e.detail()};
  }
  return {0.0, "precondition unexpectedly held"};
}

Outcome semifinite_transfer(Context& c) {
  const auto x = random_family(2, 2, c.rng);
  const ComplexMatrix u = random_unitary(2, c.rng);
  std::vector<ComplexMatrix> y;
  for (const auto& e : x) y.push_back(u * e * u.adjoint());
  const std::vector<int> levels{1, 2, 3, 4};
  const EvenTransferReport r = semifinite_transfer_check(x, y, 2, levels, 3, c.config.seed);
  return {r.max_gap, r.formulation};
}

const std::vector<Check>& registry() {
  static const std::vector<Check> checks = [] {
    std::vector<Check> v;
    auto add = [&](const char* module, const char* name, const char* anchor, double tol, CheckFn fn,
                   const char* cmp = "<=") {
      v.push_back({{module, name, anchor, tol, cmp}, std::move(fn)});
    };
    add("core-algebra", "core.tracial_property", "egalite_des_distributions", 1e-10, tracial_property);
    add("core-algebra", "core.singular_adjoint", "inegalite_sing_num_adjoint", 1e-10, singular_adjoint);
    add("core-algebra", "core.singular_add", "inegalite_sing_num_add", 1e-10, singular_add);
    add("core-algebra", "core.singular_mult", "inegalite_sing_num_mult", 1e-10, singular_mult);
    add("gadget-matrices", "gadget.full_cycle", "propriete_combinatoire_des_eij", 1e-9,
        [](Context& c) { return gadget_check(c, full_cycle_family); });
    add("gadget-matrices", "gadget.compact", "propriete_combinatoire_des_eij", 1e-9,
        [](Context& c) { return gadget_check(c, compact_family); });
    add("binomial-combinatorics", "coeff.closed_form", "egalite_entre_normeP_et_trace_avec_adjoint", 1e-12,
        closed_form_coefficients);
    add("binomial-combinatorics", "coeff.root_report", "lemme_coeff_binomial_non_nul", 1e-8, root_report);
    add("binomial-combinatorics", "coeff.nonvanishing", "lemme_coeff_binomial_non_nul", 1e-12, nonvanishing, ">=");
    add("binomial-combinatorics", "coeff.elementary_identity", "lemme_combinatoire", 0.0, elementary_identity);
    add("moment-reconstruction", "recon.combinatorial_lemma", "enonce_lemme_combinatoire", 1e-9, combinatorial_lemma);
    add("moment-reconstruction", "recon.word_traces", "egalite_entre_normeP_et_trace_avec_adjoint", 1e-4, word_traces);
    add("star-distribution", "dist.conjugation_tables", "equirepartition", 1e-10, conjugation_tables);
    add("star-distribution", "dist.reconstructed_tables", "thm_principal", 5e-4, reconstructed_tables);
    add("star-distribution", "dist.transposition_level1", "hypothese_p_c.isometrie", 1e-10,
        [](Context& c) { return transposition_level(c, 1); });
    add("star-distribution", "dist.transposition_level2", "hypothese_p_c.isometrie", 1e-3,
        [](Context& c) { return transposition_level(c, 2); }, ">=");
    add("star-distribution", "dist.multiplicativity_conjugation", "norme_de_u-u2", 1e-8, multiplicativity_conjugation);
    add("star-distribution", "dist.multiplicativity_counterexample", "theoreme_2_rudin_nc", 1e-6,
        multiplicativity_counterexample, ">=");
    add("star-distribution", "dist.adjoint_conjugation", "isometrie_preserve_adjoint", 1e-10, adjoint_conjugation);
    add("star-distribution", "dist.linearization", "cas_auto_adjoint", 1e-10, linearization);
    add("star-distribution", "dist.jordan_identity", "cas_ou_E_est_tout_Lp", 1e-9, jordan_identity);
    add("corner-norms", "psi.ode_residual", "equa_diff_de_psi", 1e-7, psi_ode);
    add("corner-norms", "psi.series_agreement", "dse_psi", 1e-10, psi_series_agreement);
    add("corner-norms", "psi.sign_rule", "positivite_psi", 1e-12, psi_sign_rule);
    add("corner-norms", "psi.tail_positivity", "equa_diff_qualitatif", 1e-12, tail_positivity);
    add("corner-norms", "psi.four_function_identity", "expression_de_p-puiss_avec_psi", 1e-9, four_function_identity);
    add("corner-norms", "pm.closed_form", "def_de_Pm", 1e-8, cycle_closed_form);
    add("corner-norms", "pm.sum_of_powers", "lemme_somme_de_puiss_a_i", 1e-9, sum_of_powers);
    add("corner-norms", "evennorm.recovery", "pour_calculer_norme_2n_de_a", 1e-3, even_norm_recovery);
    add("corner-norms", "fourterm.inequality", "ineg_a_quatre_termes", 1e-10, four_term_inequality);
    add("corner-norms", "fourterm.counterexample", "ineg_a_quatre_termes", 1e-12, four_term_counterexample);
    add("corner-norms", "truncation.order", "convergence_en_mesure_cas_NC", 0.6, truncation_order);
    add("even-p-expansion", "evenp.expansion", "decomp_de_norme_2m_comme_somme", 1e-9, even_expansion);
    add("even-p-expansion", "evenp.transfer_conjugation", "p=2m_m_isometrie_implique_c.isom", 1e-8,
        even_transfer_conjugation);
    add("even-p-expansion", "evenp.transposition_precondition", "p=2m_m_isometrie_implique_c.isom", 1e-9,
        even_transposition_precondition, ">=");
    add("even-p-expansion", "evenp.semifinite_transfer", "p=2m_m_isometrie_implique_c.isom_semifini", 1e-8,
        semifinite_transfer);
    return v;
  }();
  return checks;
}

const Check* find_check(const std::string& name) {
  for (const auto& c : registry())
    if (c.info.name == name) return &c;
  return nullptr;
}

}  // namespace

const std::vector<CheckInfo>& suite_checks() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> v;
    for (const auto& c : registry()) v.push_back(c.info);
    return v;
  }();
  return infos;
}

std::vector<std::string> suite_modules() {
  std::vector<std::string> out;
  for (const auto& m : kModules) out.emplace_back(m.name);
  return out;
}

const std::set<std::string>& known_anchors() {
  static const std::set<std::string> anchors{
      "cas_auto_adjoint",
      "cas_ou_E_est_tout_Lp",
      "convergence_en_mesure_cas_NC",
      "convergence_en_mesure_cas_NC2",
      "decomp_de_norme_2m_comme_somme",
      "def_coeff_binomial",
      "def_de_Pm",
      "definition_de_Sz",
      "dse_psi",
      "egalite_des_distributions",
      "egalite_entre_normeP_et_trace_avec_adjoint",
      "egalite_entre_normeP_et_trace_avec_adjoint_nb",
      "enonce_lemme_combinatoire",
      "equa_diff_de_psi",
      "equa_diff_qualitatif",
      "equirepartition",
      "equivalence_entre_dans_L2n_et_image",
      "expression_de_p-puiss_avec_psi",
      "hypothese_p_c.isometrie",
      "ineg_a_quatre_termes",
      "inegalite_sing_num_add",
      "inegalite_sing_num_adjoint",
      "inegalite_sing_num_mult",
      "isometrie_Lp_est_isom_sur_L2",
      "isometrie_preserve_adjoint",
      "lemme_coeff_binomial_non_nul",
      "lemme_combinatoire",
      "lemme_equidistribution_implique_isomorphisme",
      "lemme_somme_de_puiss_a_i",
      "norme_de_u-u2",
      "p=2m_m_isometrie_implique_c.isom",
      "p=2m_m_isometrie_implique_c.isom_semifini",
      "positivite_psi",
      "pour_calculer_norme_2n_de_a",
      "propriete_combinatoire_des_eij",
      "proprietes_de_psi",
      "theoreme_2_rudin_nc",
      "thm_principal",
  };
  return anchors;
}

void SuiteConfig::validate() const {
  for (const auto& [name, tol] : tolerances) {
    if (!find_check(name)) throw ConfigError("unknown check in tolerances: " + name);
    if (!(tol >= 0.0) || !std::isfinite(tol)) throw ConfigError("tolerance for " + name + " must be finite and >= 0");
  }
  if (p_grid.empty()) throw ConfigError("p_grid must not be empty");
  for (double p : p_grid)
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("p_grid values must be positive");
  for (const auto& [module, cap] : dim_caps) {
    const ModuleGuard* g = find_module(module);
    if (!g) throw ConfigError("unknown module in dim_caps: " + module);
    if (cap < 1 || cap > g->max_cap)
      throw ConfigError("cap for " + module + " must lie in [1, " + std::to_string(g->max_cap) + "]");
  }
  for (const auto& module : modules)
    if (!find_module(module)) throw ConfigError("unknown module: " + module);
}

int SuiteConfig::cap(const std::string& module) const {
  const auto it = dim_caps.find(module);
  if (it != dim_caps.end()) return it->second;
  const ModuleGuard* g = find_module(module);
  return g ? g->default_cap : 1;
}

namespace {

ReportFormat parse_format(const std::string& f) {
  if (f == "json") return ReportFormat::Json;
  if (f == "csv") return ReportFormat::Csv;
  throw ConfigError("format must be json or csv, got " + f);
}

}  // namespace

SuiteConfig SuiteConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("suite config must be a JSON object");
  static const std::set<std::string> keys{"seed", "tolerances", "p_grid", "dim_caps", "modules", "output", "format"};
  for (const auto& [key, _] : doc.items())
    if (!keys.count(key)) throw ConfigError("unknown config key: " + key);
  SuiteConfig c;
  try {
    c.seed = doc.contains("seed") ? doc["seed"].get<std::uint64_t>() : default_seed();
    if (doc.contains("tolerances")) c.tolerances = doc["tolerances"].get<std::map<std::string, double>>();
    if (doc.contains("p_grid")) c.p_grid = doc["p_grid"].get<std::vector<double>>();
    if (doc.contains("dim_caps")) c.dim_caps = doc["dim_caps"].get<std::map<std::string, int>>();
    if (doc.contains("modules")) c.modules = doc["modules"].get<std::set<std::string>>();
    if (doc.contains("output")) {
      const auto& out = doc["output"];
      if (out.is_string()) {
        c.output = out.get<std::string>();
      } else if (out.is_object()) {
        c.output = out.value("path", "");
        if (out.contains("format")) c.format = parse_format(out["format"].get<std::string>());
      } else {
        throw ConfigError("output must be a path or {path, format}");
      }
    }
    if (doc.contains("format")) c.format = parse_format(doc["format"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed suite config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json SuiteConfig::to_json() const {
  return {{"seed", seed},
          {"tolerances", tolerances},
          {"p_grid", p_grid},
          {"dim_caps", dim_caps},
          {"modules", modules},
          {"output", output},
          {"format", format == ReportFormat::Csv ? "csv" : "json"}};
}

nlohmann::json ReportDocument::to_json() const {
  nlohmann::json records_json = nlohmann::json::array();
  for (const auto& r : records) {
    records_json.push_back({{"module", r.module},
                            {"name", r.name},
                            {"anchor", r.anchor},
                            {"pass", r.pass},
                            {"measured", r.measured ? nlohmann::json(*r.measured) : nlohmann::json(nullptr)},
                            {"tolerance", r.tolerance},
                            {"comparison", r.comparison},
                            {"runtime_seconds", r.runtime_seconds},
                            {"detail", r.detail}});
  }
  return {{"config", config},
          {"records", records_json},
          {"summary", {{"total", total}, {"passed", passed}, {"failed", failed}}}};
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string ReportDocument::to_csv() const {
  std::ostringstream out;
  out << "name,module,anchor,pass,measured,comparison,tolerance,runtime_seconds,detail\n";
  for (const auto& r : records) {
    out << csv_field(r.name) << ',' << csv_field(r.module) << ',' << csv_field(r.anchor) << ','
        << (r.pass ? "true" : "false") << ',';
    if (r.measured) out << shortest(*r.measured);
    out << ',' << r.comparison << ',' << shortest(r.tolerance) << ',' << shortest(r.runtime_seconds) << ','
        << csv_field(r.detail)
        << '\n';
  }
  return out.str();
}

ReportDocument run_suite(const SuiteConfig& config) {
  config.validate();
  ReportDocument doc;
  doc.config = config.to_json();
  for (const Check& check : registry()) {
    if (!config.modules.empty() && !config.modules.count(check.info.module)) continue;
    CheckRecord rec;
    rec.module = check.info.module;
    rec.name = check.info.name;
    rec.anchor = check.info.anchor;
    rec.comparison = check.info.comparison;
    const auto override_it = config.tolerances.find(check.info.name);
    rec.tolerance = override_it != config.tolerances.end() ? override_it->second : check.info.tolerance;

    Context ctx{config, config.cap(check.info.module), make_rng(config.seed, stream_of(check.info.name))};
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = check.run(ctx);
      rec.measured = o.measured;
      rec.detail = o.detail;
      rec.pass = rec.comparison == ">=" ? o.measured >= rec.tolerance : o.measured <= rec.tolerance;
    } catch (const std::exception& e) {
      rec.pass = false;
      rec.detail = std::string("raised: ") + e.what();
    }
    rec.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    doc.records.push_back(std::move(rec));
  }
  std::sort(doc.records.begin(), doc.records.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  doc.total = static_cast<int>(doc.records.size());
  doc.passed = static_cast<int>(std::count_if(doc.records.begin(), doc.records.end(), [](const auto& r) { return r.pass; }));
  doc.failed = doc.total - doc.passed;
  return doc;
}

}  // namespace ncm
