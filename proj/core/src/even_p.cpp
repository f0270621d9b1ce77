#include "ncm/even_p.hpp"

#include "ncm/binomial.hpp"
#include "ncm/distribution.hpp"
#include "ncm/errors.hpp"
#include "ncm/gadgets.hpp"
#include "ncm/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace ncm {

namespace {

double binom_int(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return generalized_binomial(static_cast<double>(n), k);
}

int family_dim(std::span<const ComplexMatrix> family, const char* what) {
  if (family.empty()) throw std::invalid_argument(std::string(what) + ": empty family");
  const auto d = family.front().rows();
  for (const auto& x : family) {
    require_square(x, what);
    if (x.rows() != d) throw std::invalid_argument(std::string(what) + ": members must share one dimension");
  }
  return static_cast<int>(d);
}

void check_guard(int family_size, int m) {
  if (m < 1) throw std::invalid_argument("even-p expansion: m must be >= 1");
  if (std::pow(2.0 * family_size, 2.0 * m) > kWordGuard)
    throw GuardExceededError("even-p expansion: (2N)^{2m} exceeds 1e6 words");
}

}  // namespace

double even_weight(int m, int k, int alpha) {
  if (m < 1 || k < 0 || alpha < 0) throw std::invalid_argument("even_weight: invalid argument");
  if (k == 0) return 1.0;
  double w = 0.0;
  for (int j = 1; j <= k; ++j)
    w += (static_cast<double>(j) / k) * binom_int(m, j) * binom_int(alpha, k - j);
  return w;
}

double even_weight(int m, const StarWord& word) {
  if (word.empty()) return even_weight(m, 0, 0);
  return even_weight(m, static_cast<int>(word.size()), alpha_count(star_pattern(word)));
}

EvenNormExpansion even_norm_expansion(int family_size, int m) {
  check_guard(family_size, m);
  EvenNormExpansion out;
  out.m = m;
  out.family_size = family_size;
  for (StarWord& word : enumerate_words(family_size, 2 * m)) {
    const double w = even_weight(m, word);
    if (w != 0.0) out.terms.push_back({std::move(word), w});
  }
  return out;
}

double expand_even_norm(std::span<const ComplexMatrix> coeffs, std::span<const ComplexMatrix> elements, int m) {
  if (coeffs.size() != elements.size())
    throw std::invalid_argument("expand_even_norm: one coefficient per element is required");
  check_guard(static_cast<int>(elements.size()), m);
  if (elements.empty()) return 1.0;
  const int n = family_dim(coeffs, "coefficients");
  const int d = family_dim(elements, "elements");
  const int size = static_cast<int>(elements.size());

  std::vector<ComplexMatrix> a_adj, x_adj;
  for (const auto& a : coeffs) a_adj.emplace_back(a.adjoint());
  for (const auto& x : elements) x_adj.emplace_back(x.adjoint());

  // Weights depend on (k, alpha) only.
  std::map<std::pair<int, int>, double> weights;
  auto weight = [&](const StarWord& word) {
    const int k = static_cast<int>(word.size());
    const int alpha = alpha_count(star_pattern(word));
    auto [it, fresh] = weights.try_emplace({k, alpha}, 0.0);
    if (fresh) it->second = even_weight(m, k, alpha);
    return it->second;
  };

  // The two traces factor; both prefix products are carried down the tree.
  Complex total = 1.0;
  StarWord word;
  std::function<void(const ComplexMatrix&, const ComplexMatrix&)> visit =
      [&](const ComplexMatrix& pa, const ComplexMatrix& px) {
        if (static_cast<int>(word.size()) == 2 * m) return;
        for (int i = 0; i < size; ++i)
          for (bool star : {false, true}) {
            const ComplexMatrix na = pa * (star ? a_adj[i] : coeffs[i]);
            const ComplexMatrix nx = px * (star ? x_adj[i] : elements[i]);
            word.push_back({i + 1, star});
            const double w = weight(word);
            if (w != 0.0) total += w * (na.trace() / static_cast<double>(n)) * (nx.trace() / static_cast<double>(d));
            visit(na, nx);
            word.pop_back();
          }
      };
  visit(ComplexMatrix::Identity(n, n), ComplexMatrix::Identity(d, d));
  return total.real();
}

namespace {

ComplexMatrix tensor_sum(std::span<const ComplexMatrix> coeffs, std::span<const ComplexMatrix> elements) {
  const auto n = coeffs.front().rows();
  const auto d = elements.front().rows();
  ComplexMatrix s = ComplexMatrix::Zero(n * d, n * d);
  for (std::size_t j = 0; j < coeffs.size(); ++j) s += kron(coeffs[j], elements[j]);
  return s;
}

}  // namespace

double direct_even_norm(std::span<const ComplexMatrix> coeffs, std::span<const ComplexMatrix> elements, int m) {
  if (m < 1) throw std::invalid_argument("direct_even_norm: m must be >= 1");
  if (coeffs.size() != elements.size())
    throw std::invalid_argument("direct_even_norm: one coefficient per element is required");
  if (elements.empty()) return 1.0;
  family_dim(coeffs, "coefficients");
  family_dim(elements, "elements");
  ComplexMatrix s = tensor_sum(coeffs, elements);
  s.diagonal().array() += 1.0;
  return schatten_p_power(s, 2.0 * m);
}

namespace {

std::vector<ComplexMatrix> random_coefficients(int count, int level, Rng& rng) {
  std::vector<ComplexMatrix> a;
  for (int j = 0; j < count; ++j) a.push_back(random_with_norm(level, 1.0, rng));
  return a;
}

void check_pair(std::span<const ComplexMatrix> x, std::span<const ComplexMatrix> y, int trials) {
  if (x.size() != y.size()) throw std::invalid_argument("transfer check: families differ in size");
  family_dim(x, "x family");
  family_dim(y, "y family");
  if (trials < 1) throw std::invalid_argument("transfer check: trials must be >= 1");
}

/// Norm comparison shared by both variants; `unit` adds the identity summand.
void compare_levels(EvenTransferReport& report, std::span<const ComplexMatrix> x,
                    std::span<const ComplexMatrix> y, int m, std::span<const int> levels, int trials,
                    std::uint64_t seed, bool unit) {
  const double p = 2.0 * m;
  for (int level : levels) {
    if (level < 1) throw std::invalid_argument("transfer check: levels must be >= 1");
    LevelGap gap{level, 0.0};
    for (int t = 0; t < trials; ++t) {
      Rng rng = make_rng(seed, static_cast<std::uint64_t>(level) * 1000003u + static_cast<std::uint64_t>(t));
      const auto a = random_coefficients(static_cast<int>(x.size()), level, rng);
      ComplexMatrix sx = tensor_sum(a, x);
      ComplexMatrix sy = tensor_sum(a, y);
      if (unit) {
        sx.diagonal().array() += 1.0;
        sy.diagonal().array() += 1.0;
      }
      gap.max_gap = std::max(gap.max_gap, std::abs(schatten_p_norm(sx, p) - schatten_p_norm(sy, p)));
    }
    report.max_gap = std::max(report.max_gap, gap.max_gap);
    report.levels.push_back(gap);
  }
  report.pass = report.max_gap <= kTransferNormTolerance;
}

}  // namespace

EvenTransferReport even_p_transfer_check(std::span<const ComplexMatrix> x_family,
                                         std::span<const ComplexMatrix> y_family, int m,
                                         std::span<const int> levels, int trials, std::uint64_t seed) {
  check_pair(x_family, y_family, trials);
  const EvenNormExpansion expansion = even_norm_expansion(static_cast<int>(x_family.size()), m);
  EvenTransferReport report;
  report.formulation = "constrained moments: every word of length <= 2m with nonzero weight";
  report.trials = trials;
  report.seed = seed;
  for (const EvenNormTerm& term : expansion.terms) {
    const double gap = std::abs(word_trace(x_family, term.word) - word_trace(y_family, term.word));
    report.moment_gap = std::max(report.moment_gap, gap);
    ++report.constrained_words;
    if (gap > kConstrainedMomentTolerance)
      throw PreconditionFailedError("constrained moments differ at word " + to_string(term.word) +
                                        " (gap " + std::to_string(gap) + ")",
                                    to_string(term.word));
  }
  compare_levels(report, x_family, y_family, m, levels, trials, seed, true);
  return report;
}

Complex semifinite_coefficient(std::span<const ComplexMatrix> family, std::span<const int> indices) {
  const int len = static_cast<int>(indices.size());
  if (len < 2 || len % 2 != 0) throw std::invalid_argument("semifinite_coefficient: need 2m indices");
  const int d = family_dim(family, "family");
  for (int i : indices)
    if (i < 1 || i > static_cast<int>(family.size()))
      throw std::invalid_argument("semifinite_coefficient: index out of range");
  const int m = len / 2;
  const GadgetFamily gadget = compact_family(len);

  // Slots alternate X^*, X. An X^* slot takes an odd variable, contributing
  // a_j (x) x_j^*; an X slot takes an even variable, contributing a_j (x) x_j.
  std::vector<int> odd(m), even(m);
  for (int s = 0; s < m; ++s) {
    odd[s] = 2 * s;
    even[s] = 2 * s + 1;
  }
  Complex total = 0.0;
  do {
    std::vector<int> ev = even;
    do {
      ComplexMatrix ga = ComplexMatrix::Identity(gadget.dim, gadget.dim);
      ComplexMatrix ex = ComplexMatrix::Identity(d, d);
      for (int s = 0; s < m; ++s) {
        ga = ga * gadget.matrices[odd[s]] * gadget.matrices[ev[s]];
        ex = ex * family[indices[odd[s]] - 1].adjoint() * family[indices[ev[s]] - 1];
      }
      const Complex tg = normalized_trace(ga);
      if (tg != Complex(0.0)) total += tg * normalized_trace(ex);
    } while (std::next_permutation(ev.begin(), ev.end()));
  } while (std::next_permutation(odd.begin(), odd.end()));
  return total;
}

EvenTransferReport semifinite_transfer_check(std::span<const ComplexMatrix> x_family,
                                             std::span<const ComplexMatrix> y_family, int m,
                                             std::span<const int> levels, int trials, std::uint64_t seed) {
  check_pair(x_family, y_family, trials);
  if (m < 1) throw std::invalid_argument("semifinite_transfer_check: m must be >= 1");
  const int size = static_cast<int>(x_family.size());
  if (std::pow(static_cast<double>(size), 2.0 * m) > kWordGuard)
    throw GuardExceededError("semifinite_transfer_check: N^{2m} exceeds 1e6 index tuples");

  EvenTransferReport report;
  report.formulation = "semifinite: tau(x_{i1}^* x_{i2} ... x_{i(2m-1)}^* x_{i(2m)}) for all index tuples";
  report.trials = trials;
  report.seed = seed;
  std::vector<int> idx(2 * m, 1);
  while (true) {
    const double gap = std::abs(semifinite_coefficient(x_family, idx) - semifinite_coefficient(y_family, idx));
    report.moment_gap = std::max(report.moment_gap, gap);
    ++report.constrained_words;
    if (gap > kConstrainedMomentTolerance) {
      StarWord w;
      for (int s = 0; s < 2 * m; ++s) w.push_back({idx[s], s % 2 == 0});
      throw PreconditionFailedError("semifinite moments differ at word " + to_string(w), to_string(w));
    }
    int j = 0;
    while (j < 2 * m && ++idx[j] > size) idx[j++] = 1;
    if (j == 2 * m) break;
  }
  compare_levels(report, x_family, y_family, m, levels, trials, seed, false);
  return report;
}

}  // namespace ncm
