#include "ncm/distribution.hpp"

#include "ncm/errors.hpp"
#include "ncm/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace ncm {

double word_count(int family_size, int maxdeg) {
  if (family_size < 0 || maxdeg < 0) throw std::invalid_argument("word_count: negative argument");
  double total = 0.0;
  double layer = 1.0;
  for (int k = 0; k <= maxdeg; ++k) {
    total += layer;
    layer *= 2.0 * family_size;
    if (layer == 0.0) break;
  }
  return total;
}

std::vector<StarWord> enumerate_words(int family_size, int maxdeg) {
  if (word_count(family_size, maxdeg) > kWordGuard)
    throw GuardExceededError("word enumeration over " + std::to_string(family_size) +
                             " letters up to degree " + std::to_string(maxdeg) + " exceeds 1e6 words");
  std::vector<StarWord> out{StarWord{}};
  std::size_t begin = 0;
  for (int k = 1; k <= maxdeg && family_size > 0; ++k) {
    const std::size_t end = out.size();
    for (std::size_t w = begin; w < end; ++w)
      for (int i = 1; i <= family_size; ++i)
        for (bool star : {false, true}) {
          StarWord next = out[w];
          next.push_back({i, star});
          out.push_back(std::move(next));
        }
    begin = end;
  }
  return out;
}

Complex MomentTable::at(const StarWord& word) const {
  const auto it = entries.find(word);
  if (it == entries.end()) throw std::out_of_range("word " + to_string(word) + " not in moment table");
  return it->second;
}

MomentTable star_moments(std::span<const ComplexMatrix> family, int maxdeg) {
  if (maxdeg < 0) throw std::invalid_argument("star_moments: negative degree");
  const int size = static_cast<int>(family.size());
  if (word_count(size, maxdeg) > kWordGuard)
    throw GuardExceededError("star_moments: more than 1e6 words");
  MomentTable table;
  table.maxdeg = maxdeg;
  table.family_size = size;
  table.entries[StarWord{}] = Complex(1.0);
  if (size == 0) return table;

  const auto dim = family.front().rows();
  for (const auto& x : family) {
    require_square(x, "family member");
    if (x.rows() != dim) throw std::invalid_argument("star_moments: members must share one dimension");
  }
  std::vector<ComplexMatrix> adjoints;
  for (const auto& x : family) adjoints.emplace_back(x.adjoint());

  // Depth-first over words, carrying the prefix product.
  StarWord word;
  std::function<void(const ComplexMatrix&)> visit = [&](const ComplexMatrix& prefix) {
    if (static_cast<int>(word.size()) == maxdeg) return;
    for (int i = 1; i <= size; ++i)
      for (bool star : {false, true}) {
        const ComplexMatrix next = prefix * (star ? adjoints[i - 1] : family[i - 1]);
        word.push_back({i, star});
        table.entries[word] = next.trace() / static_cast<double>(dim);
        visit(next);
        word.pop_back();
      }
  };
  visit(ComplexMatrix::Identity(dim, dim));
  return table;
}

ReconstructedTable reconstructed_moments(std::span<const ComplexMatrix> family, int maxdeg,
                                         double p, const ReconstructOptions& options) {
  ReconstructedTable out;
  out.table.maxdeg = maxdeg;
  out.table.family_size = static_cast<int>(family.size());
  for (const StarWord& word : enumerate_words(out.table.family_size, maxdeg)) {
    const Reconstruction rec = reconstruct_word_trace(family, word, p, options);
    out.table.entries[word] = rec.estimate;
    out.max_residual = std::max(out.max_residual, rec.residual);
  }
  return out;
}

DistributionComparison distributions_match(const MomentTable& a, const MomentTable& b, double tol) {
  if (a.maxdeg != b.maxdeg || a.family_size != b.family_size || a.size() != b.size())
    throw std::invalid_argument("distributions_match: tables differ in shape");
  DistributionComparison out;
  out.tolerance = tol;
  for (const auto& [word, value] : a.entries) {
    const auto it = b.entries.find(word);
    if (it == b.entries.end())
      throw std::invalid_argument("distributions_match: word " + to_string(word) + " missing");
    const double gap = std::abs(value - it->second);
    if (gap > out.worst_gap) {
      out.worst_gap = gap;
      out.worst_word = word;
    }
  }
  out.pass = out.worst_gap <= tol;
  return out;
}

namespace {

Eigen::VectorXcd vec(const ComplexMatrix& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

}  // namespace

SpanMap::SpanMap(std::vector<ComplexMatrix> basis, std::vector<ComplexMatrix> images, bool unital)
    : basis_(std::move(basis)), images_(std::move(images)), unital_(unital) {
  if (basis_.empty()) throw std::invalid_argument("SpanMap: empty basis");
  if (basis_.size() != images_.size())
    throw std::invalid_argument("SpanMap: basis and images differ in length");
  require_square(basis_.front(), "basis element");
  require_square(images_.front(), "image");
  domain_dim_ = static_cast<int>(basis_.front().rows());
  image_dim_ = static_cast<int>(images_.front().rows());
  for (const auto& b : basis_) {
    require_square(b, "basis element");
    if (b.rows() != domain_dim_) throw std::invalid_argument("SpanMap: basis dimensions differ");
  }
  for (const auto& y : images_) {
    require_square(y, "image");
    if (y.rows() != image_dim_) throw std::invalid_argument("SpanMap: image dimensions differ");
  }

  const auto k = static_cast<Eigen::Index>(basis_.size());
  stacked_.resize(static_cast<Eigen::Index>(domain_dim_) * domain_dim_, k);
  for (Eigen::Index j = 0; j < k; ++j) stacked_.col(j) = vec(basis_[j]);
  const Eigen::MatrixXcd gram = stacked_.adjoint() * stacked_;
  const Eigen::VectorXd ev = hermitian_eigenvalues(gram);
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  gram_condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(gram_condition_ < kGramConditionLimit))
    throw std::invalid_argument("SpanMap: basis is not linearly independent (Gram condition " +
                                std::to_string(gram_condition_) + ")");
  qr_.compute(stacked_);

  if (unital_) {
    const ComplexMatrix one = ComplexMatrix::Identity(domain_dim_, domain_dim_);
    const Coordinates c = coordinates(one);
    if (c.residual >= kSpanResidualTolerance)
      throw std::invalid_argument("SpanMap: unital map but the identity is not in the span");
    const ComplexMatrix image = apply_coefficients(c.coefficients);
    const ComplexMatrix target = ComplexMatrix::Identity(image_dim_, image_dim_);
    if (normalized_hs_norm(image - target) >= kSpanResidualTolerance)
      throw std::invalid_argument("SpanMap: unital map does not send the identity to the identity");
  }
}

SpanMap SpanMap::identity(std::vector<ComplexMatrix> basis, bool unital) {
  std::vector<ComplexMatrix> images = basis;
  return SpanMap(std::move(basis), std::move(images), unital);
}

SpanMap SpanMap::conjugation(std::vector<ComplexMatrix> basis, const ComplexMatrix& unitary, bool unital) {
  std::vector<ComplexMatrix> images;
  for (const auto& b : basis) images.emplace_back(unitary * b * unitary.adjoint());
  return SpanMap(std::move(basis), std::move(images), unital);
}

SpanMap SpanMap::transposition(int dim) {
  if (dim < 1) throw std::invalid_argument("SpanMap::transposition: dim must be >= 1");
  std::vector<ComplexMatrix> basis, images;
  for (int i = 1; i <= dim; ++i)
    for (int j = 1; j <= dim; ++j) {
      basis.push_back(elementary(dim, i, j));
      images.push_back(elementary(dim, j, i));
    }
  return SpanMap(std::move(basis), std::move(images), true);
}

SpanMap::Coordinates SpanMap::coordinates(const ComplexMatrix& x) const {
  if (x.rows() != domain_dim_ || x.cols() != domain_dim_)
    throw std::invalid_argument("SpanMap::coordinates: dimension mismatch");
  const Eigen::VectorXcd target = vec(x);
  Coordinates out;
  out.coefficients = qr_.solve(target);
  // The vectorized 2-norm is sqrt(dim) times the normalized one; the ratio cancels it.
  const double miss = (stacked_ * out.coefficients - target).norm();
  out.residual = miss / std::max(std::sqrt(static_cast<double>(domain_dim_)), target.norm());
  return out;
}

ComplexMatrix SpanMap::apply_coefficients(const Eigen::VectorXcd& c) const {
  if (c.size() != size()) throw std::invalid_argument("SpanMap: coefficient count mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(image_dim_, image_dim_);
  for (int k = 0; k < size(); ++k) out += c[k] * images_[k];
  return out;
}

std::optional<ComplexMatrix> SpanMap::apply(const ComplexMatrix& x) const {
  const Coordinates c = coordinates(x);
  if (c.residual >= kSpanResidualTolerance) return std::nullopt;
  return apply_coefficients(c.coefficients);
}

namespace {

struct LevelPair {
  ComplexMatrix domain;
  ComplexMatrix image;
};

LevelPair assemble(const SpanMap& u, int level, const std::vector<Complex>& c) {
  const int d = u.domain_dim();
  const int e = u.image_dim();
  const int k = u.size();
  LevelPair out{ComplexMatrix::Identity(level * d, level * d), ComplexMatrix::Identity(level * e, level * e)};
  for (int i = 0; i < level; ++i)
    for (int j = 0; j < level; ++j)
      for (int b = 0; b < k; ++b) {
        const Complex coef = c[static_cast<std::size_t>((i * level + j) * k + b)];
        if (coef == Complex(0.0)) continue;
        out.domain.block(i * d, j * d, d, d) += coef * u.basis()[b];
        out.image.block(i * e, j * e, e, e) += coef * u.images()[b];
      }
  return out;
}

double norm_gap(const SpanMap& u, int level, double p, const std::vector<Complex>& c) {
  const LevelPair m = assemble(u, level, c);
  return std::abs(schatten_p_norm(m.domain, p) - schatten_p_norm(m.image, p));
}

Complex clamp_to_disc(Complex c) {
  const double r = std::abs(c);
  return r > 1.0 ? c / r : c;
}

}  // namespace

IsometryProbeReport complete_isometry_probe(const SpanMap& u, int level, double p, int trials,
                                            std::uint64_t seed, int ascent_steps) {
  if (level < 1) throw std::invalid_argument("complete_isometry_probe: level must be >= 1");
  if (trials < 1) throw std::invalid_argument("complete_isometry_probe: trials must be >= 1");
  if (!(p > 0.0)) throw std::invalid_argument("complete_isometry_probe: p must be positive");
  if (ascent_steps < 0) throw std::invalid_argument("complete_isometry_probe: negative ascent steps");

  const std::size_t count = static_cast<std::size_t>(level) * level * u.size();
  IsometryProbeReport out;
  out.level = level;
  out.p = p;
  out.trials = trials;
  out.seed = seed;
  out.ascent_steps = ascent_steps;

  std::vector<Complex> best(count, Complex(0.0));
  double best_gap = -1.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
    std::vector<Complex> c(count);
    for (auto& v : c)
      v = std::polar(std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
    const double gap = norm_gap(u, level, p, c);
    if (gap > best_gap) {
      best_gap = gap;
      best = std::move(c);
    }
  }
  out.sampled_gap = best_gap;

  // Coordinate ascent; one step is a sweep over all coefficients.
  double delta = 0.25;
  const Complex moves[] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  for (int step = 0; step < ascent_steps; ++step) {
    bool improved = false;
    for (std::size_t i = 0; i < count; ++i) {
      const Complex keep = best[i];
      for (const Complex& m : moves) {
        best[i] = clamp_to_disc(keep + delta * m);
        const double gap = norm_gap(u, level, p, best);
        if (gap > best_gap) {
          best_gap = gap;
          improved = true;
          break;
        }
        best[i] = keep;
      }
    }
    if (!improved) delta /= 2.0;
  }

  out.max_gap = best_gap;
  out.witness_coefficients = best;
  LevelPair w = assemble(u, level, best);
  const int d = u.domain_dim();
  const int e = u.image_dim();
  out.witness = w.domain - ComplexMatrix::Identity(level * d, level * d);
  out.witness_image = w.image - ComplexMatrix::Identity(level * e, level * e);
  return out;
}

namespace {

void check_basis_index(const SpanMap& u, int idx, const char* what) {
  if (idx < 0 || idx >= u.size())
    throw std::invalid_argument(std::string(what) + " index " + std::to_string(idx) + " out of range");
}

}  // namespace

double multiplicativity_defect(const SpanMap& u, int a_idx, int b_idx, double p, bool use_oracle,
                               const ReconstructOptions& options) {
  check_basis_index(u, a_idx, "a");
  check_basis_index(u, b_idx, "b");
  const ComplexMatrix ab = u.basis()[a_idx] * u.basis()[b_idx];
  const std::optional<ComplexMatrix> uab = u.apply(ab);
  if (!uab)
    throw ProductOutsideSpanError("product of basis elements " + std::to_string(a_idx) + " and " +
                                  std::to_string(b_idx) + " is not in the span");
  const ComplexMatrix& ua = u.images()[a_idx];
  const ComplexMatrix& ub = u.images()[b_idx];

  Complex t1, t2, t3, t4;
  if (!use_oracle) {
    const ComplexMatrix prod = ua * ub;
    t1 = normalized_trace(prod.adjoint() * prod);
    t2 = normalized_trace(uab->adjoint() * *uab);
    t3 = normalized_trace(prod.adjoint() * *uab);
    t4 = normalized_trace(uab->adjoint() * prod);
  } else {
    if (std::abs(p - 2.0) < 1e-12 || std::abs(p - 4.0) < 1e-12)
      throw ZeroCoefficientError("multiplicativity_defect: the (*,*,1,1) coefficient vanishes at p = 2 and p = 4");
    // Every trace has the shape tau(y1^* y2^* y3 y4).
    const int e = u.image_dim();
    const std::vector<ComplexMatrix> family{ua, ub, *uab, ComplexMatrix::Identity(e, e)};
    auto moment = [&](const char* word) {
      return reconstruct_word_trace(family, parse_word(word), p, options).estimate;
    };
    t1 = moment("2*,1*,1,2");
    t2 = moment("3*,4*,4,3");
    t3 = moment("2*,1*,3,4");
    t4 = moment("3*,4*,1,2");
  }
  return std::max(0.0, (t1 + t2 - t3 - t4).real());
}

double adjoint_defect(const SpanMap& u, int x_idx) {
  check_basis_index(u, x_idx, "x");
  const ComplexMatrix& x = u.basis()[x_idx];
  const std::optional<ComplexMatrix> image = u.apply(x.adjoint());
  if (!image)
    throw AdjointOutsideSpanError("adjoint of basis element " + std::to_string(x_idx) + " is not in the span");
  return normalized_hs_norm(*image - u.images()[x_idx].adjoint());
}

namespace {

void require_hermitian_family(std::span<const ComplexMatrix> family, const char* what) {
  for (const auto& x : family) {
    require_square(x, what);
    if (!is_hermitian(x)) throw std::invalid_argument(std::string(what) + ": member is not Hermitian");
  }
}

/// Permutations s of {0..k-1} with tr(E_{s(0)} ... E_{s(k-1)}) != 0, where
/// E_j = e_{j, j+1 mod k}, together with that trace.
std::vector<std::pair<std::vector<int>, double>> surviving_orders(int k) {
  std::vector<ComplexMatrix> units;
  for (int j = 1; j <= k; ++j) units.push_back(elementary(k, j, j % k + 1));
  std::vector<int> perm(k);
  for (int j = 0; j < k; ++j) perm[j] = j;
  std::vector<std::pair<std::vector<int>, double>> out;
  do {
    ComplexMatrix prod = ComplexMatrix::Identity(k, k);
    for (int j : perm) prod = prod * units[j];
    const double tr = normalized_trace(prod).real();
    if (tr != 0.0) out.emplace_back(perm, tr);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// Coefficient of z_1 ... z_k in tr((sum_j a_j (x) x_{i_j})^k).
Complex extracted_coefficient(std::span<const ComplexMatrix> family, const StarWord& word,
                              const std::vector<std::pair<std::vector<int>, double>>& orders) {
  Complex total = 0.0;
  StarWord permuted(word.size());
  for (const auto& [perm, gadget_trace] : orders) {
    for (std::size_t t = 0; t < perm.size(); ++t) permuted[t] = word[perm[t]];
    total += gadget_trace * word_trace(family, permuted);
  }
  return total;
}

ComplexMatrix linearized_sum(std::span<const ComplexMatrix> family, const StarWord& word,
                             const std::vector<Complex>& z) {
  const int k = static_cast<int>(word.size());
  const auto d = family.front().rows();
  ComplexMatrix s = ComplexMatrix::Zero(k * d, k * d);
  for (int j = 0; j < k; ++j) {
    const ComplexMatrix a = z[j] * elementary(k, j + 1, (j + 1) % k + 1) +
                            std::conj(z[j]) * elementary(k, (j + 1) % k + 1, j + 1);
    s += kron(a, family[word[j].index - 1]);
  }
  return s;
}

}  // namespace

LinearizationReport selfadjoint_linearization_check(std::span<const ComplexMatrix> x_family,
                                                    std::span<const ComplexMatrix> y_family,
                                                    int maxdeg, double tol, std::uint64_t seed) {
  if (maxdeg < 0) throw std::invalid_argument("selfadjoint_linearization_check: negative degree");
  if (maxdeg > 8) throw GuardExceededError("selfadjoint_linearization_check: degree above 8");
  if (x_family.size() != y_family.size())
    throw std::invalid_argument("selfadjoint_linearization_check: families differ in size");
  require_hermitian_family(x_family, "x family");
  require_hermitian_family(y_family, "y family");
  LinearizationReport out;
  out.tolerance = tol;
  if (x_family.empty()) return out;

  const int s = static_cast<int>(x_family.size());
  double work = 0.0;
  double fact = 1.0;
  for (int k = 1; k <= maxdeg; ++k) {
    fact *= k;
    work += std::pow(s, k) * fact;
  }
  if (work > 5e7) throw GuardExceededError("selfadjoint_linearization_check: enumeration too large");

  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  for (int k = 1; k <= maxdeg; ++k) {
    const auto orders = surviving_orders(k);
    StarWord word(k, Letter{1, false});
    std::vector<int> digits(k, 0);
    while (true) {
      for (int j = 0; j < k; ++j) word[j] = {digits[j] + 1, false};
      const Complex cx = extracted_coefficient(x_family, word, orders);
      const Complex cy = extracted_coefficient(y_family, word, orders);
      out.extraction_error = std::max({out.extraction_error, std::abs(cx - word_trace(x_family, word)),
                                       std::abs(cy - word_trace(y_family, word))});
      const double gap = std::abs(cx - cy);
      if (gap > out.worst_gap || out.words_checked == 0) {
        out.worst_gap = gap;
        out.worst_word = word;
      }

      std::vector<Complex> z(k);
      for (auto& v : z) v = Complex(gauss(rng), gauss(rng));
      const ComplexMatrix sx = linearized_sum(x_family, word, z);
      const ComplexMatrix sy = linearized_sum(y_family, word, z);
      ComplexMatrix px = sx, py = sy;
      for (int e = 1; e < k; ++e) {
        px = px * sx;
        py = py * sy;
      }
      out.moment_gap = std::max(out.moment_gap, std::abs(normalized_trace(px) - normalized_trace(py)));
      ++out.words_checked;

      int j = 0;
      while (j < k && ++digits[j] == s) digits[j++] = 0;
      if (j == k) break;
    }
  }
  out.pass = out.worst_gap <= tol;
  return out;
}

}  // namespace ncm
