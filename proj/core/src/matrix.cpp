#include "ncm/matrix.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ncm {

std::string to_string(const StarWord& word) {
  std::ostringstream out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out << ',';
    out << word[i].index;
    if (word[i].star) out << '*';
  }
  return out.str();
}

StarWord parse_word(std::string_view text) {
  std::string compact;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  StarWord word;
  if (compact.empty()) return word;

  std::size_t pos = 0;
  while (pos <= compact.size()) {
    const std::size_t next = std::min(compact.find(',', pos), compact.size());
    std::string_view token(compact.data() + pos, next - pos);
    Letter letter;
    if (!token.empty() && token.back() == '*') {
      letter.star = true;
      token.remove_suffix(1);
    }
    int index = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), index);
    if (token.empty() || ec != std::errc{} || end != token.data() + token.size() || index < 1)
      throw std::invalid_argument("parse_word: malformed letter '" + std::string(token) + "' in '" +
                                  std::string(text) + "'");
    letter.index = index;
    word.push_back(letter);
    if (next == compact.size()) break;
    pos = next + 1;
  }
  return word;
}

std::vector<bool> star_pattern(const StarWord& word) {
  std::vector<bool> stars;
  stars.reserve(word.size());
  for (const Letter& l : word) stars.push_back(l.star);
  return stars;
}

double SingularProfile::at(double t) const {
  if (t < 0.0) throw std::invalid_argument("SingularProfile::at: t must be non-negative");
  if (dim == 0 || t >= 1.0) return 0.0;
  const auto k = static_cast<std::size_t>(std::floor(t * dim));
  return k < values.size() ? values[k] : 0.0;
}

double SingularProfile::integral_of_power(double p) const {
  double sum = 0.0;
  for (double s : values) sum += std::pow(s, p);
  return dim ? sum / dim : 0.0;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw std::invalid_argument(std::string(what) + " must be a non-empty square matrix");
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " has non-finite entries");
}

Complex normalized_trace(const ComplexMatrix& m) {
  require_square(m);
  return m.trace() / static_cast<double>(m.rows());
}

namespace {

Eigen::VectorXd singular_values(const ComplexMatrix& m) {
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

}  // namespace

double schatten_p_power(const ComplexMatrix& m, double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("schatten_p_power: p must be finite and positive");
  require_square(m);
  const Eigen::VectorXd s = singular_values(m);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) sum += std::pow(s[i], p);
  return sum / static_cast<double>(m.rows());
}

double schatten_p_norm(const ComplexMatrix& m, double p) {
  return std::pow(schatten_p_power(m, p), 1.0 / p);
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)[0];
}

SingularProfile singular_profile(const ComplexMatrix& m) {
  require_square(m);
  const Eigen::VectorXd s = singular_values(m);
  SingularProfile profile;
  profile.dim = static_cast<int>(m.rows());
  profile.values.assign(s.data(), s.data() + s.size());
  // The SVD already sorts decreasingly; keep the invariant explicit.
  std::sort(profile.values.begin(), profile.values.end(), std::greater<>());
  return profile;
}

ComplexMatrix word_product(std::span<const ComplexMatrix> family, const StarWord& word, int dim) {
  ComplexMatrix product = ComplexMatrix::Identity(dim, dim);
  for (const Letter& l : word) {
    if (l.index < 1 || static_cast<std::size_t>(l.index) > family.size())
      throw std::invalid_argument("word index " + std::to_string(l.index) + " out of range");
    const ComplexMatrix& x = family[l.index - 1];
    if (x.rows() != dim || x.cols() != dim)
      throw std::invalid_argument("word_trace: family members must share one dimension");
    if (l.star)
      product = product * x.adjoint();
    else
      product = product * x;
  }
  return product;
}

Complex word_trace(std::span<const ComplexMatrix> family, const StarWord& word) {
  if (word.empty()) return 1.0;
  if (family.empty()) throw std::invalid_argument("word_trace: empty family");
  const int dim = static_cast<int>(family.front().rows());
  return normalized_trace(word_product(family, word, dim));
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.norm(), 1e-300);
  return (m - m.adjoint()).norm() <= rel_tol * scale;
}

namespace {

ComplexMatrix symmetrized(const ComplexMatrix& m) {
  require_square(m);
  if (!is_hermitian(m)) throw std::invalid_argument("expected a Hermitian matrix");
  return (m + m.adjoint()) * 0.5;
}

}  // namespace

HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(symmetrized(m));
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eigen: no convergence");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(symmetrized(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigenvalues: no convergence");
  return solver.eigenvalues();
}

ComplexMatrix abs_power(const ComplexMatrix& m, double p) {
  require_square(m);
  return hermitian_apply(ComplexMatrix(m.adjoint() * m),
                         [p](double t) { return std::pow(std::max(t, 0.0), p / 2.0); });
}

ComplexMatrix elementary(int dim, int i, int j) {
  if (dim < 1 || i < 1 || j < 1 || i > dim || j > dim)
    throw std::invalid_argument("elementary: index out of range");
  ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
  e(i - 1, j - 1) = 1.0;
  return e;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double normalized_hs_norm(const ComplexMatrix& m) {
  if (m.rows() == 0) return 0.0;
  return m.norm() / std::sqrt(static_cast<double>(m.rows()));
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.adjoint() * b).trace() / static_cast<double>(a.rows());
}

}  // namespace ncm
