#pragma once

// Complex square matrices over the normalized trace tr_d = (1/d) Tr, with
// Schatten norms, singular-value profiles and Hermitian functional calculus.

#include <Eigen/Dense>

#include <compare>
#include <complex>
#include <concepts>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ncm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Relative tolerance below which a matrix counts as Hermitian.
inline constexpr double kHermitianTolerance = 1e-10;

/// One letter x_index^{star} of a word; `index` is 1-based.
struct Letter {
  int index = 1;
  bool star = false;

  auto operator<=>(const Letter&) const = default;
};

/// x_{i1}^{e1} x_{i2}^{e2} ... x_{ik}^{ek}. The empty word is the identity.
using StarWord = std::vector<Letter>;

/// Renders a word as "1*,2,1"; the empty word renders as "".
std::string to_string(const StarWord& word);

/// Parses the format produced by to_string. Whitespace is ignored.
StarWord parse_word(std::string_view text);

/// Star flags of a word, in order.
std::vector<bool> star_pattern(const StarWord& word);

/// Singular values sorted non-increasingly; value k occupies [k/dim, (k+1)/dim).
struct SingularProfile {
  int dim = 0;
  std::vector<double> values;

  /// mu_t for t in [0, 1); zero for t >= 1.
  double at(double t) const;
  /// Riemann sum of mu_t^p over [0, 1], exact for the step function.
  double integral_of_power(double p) const;
};

/// Throws std::invalid_argument unless m is square, non-empty and finite.
void require_square(const ComplexMatrix& m, const char* what = "matrix");

Complex normalized_trace(const ComplexMatrix& m);

/// tr(|m|^p) under the normalized trace, i.e. ||m||_p^p.
double schatten_p_power(const ComplexMatrix& m, double p);
double schatten_p_norm(const ComplexMatrix& m, double p);

/// Largest singular value.
double operator_norm(const ComplexMatrix& m);

SingularProfile singular_profile(const ComplexMatrix& m);

/// Normalized trace of the product family[i1-1]^{e1} ... family[ik-1]^{ek}.
/// Returns 1 for the empty word. All members must share one dimension.
Complex word_trace(std::span<const ComplexMatrix> family, const StarWord& word);

/// The ordered product itself (identity of `dim` for the empty word).
ComplexMatrix word_product(std::span<const ComplexMatrix> family, const StarWord& word, int dim);

bool is_hermitian(const ComplexMatrix& m, double rel_tol = kHermitianTolerance);

struct HermitianEigen {
  Eigen::VectorXd values;
  ComplexMatrix vectors;
};

/// Spectral decomposition of a Hermitian matrix. The input is symmetrized
/// before decomposition; non-Hermitian input throws std::invalid_argument.
HermitianEigen hermitian_eigen(const ComplexMatrix& m);

/// Eigenvalues only, ascending.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m);

/// f applied to the spectrum of a Hermitian matrix.
template <std::invocable<double> F>
ComplexMatrix hermitian_apply(const ComplexMatrix& m, F&& f) {
  const HermitianEigen eig = hermitian_eigen(m);
  Eigen::VectorXd mapped(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) mapped[i] = f(eig.values[i]);
  return eig.vectors * mapped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

/// |m|^p = (m* m)^{p/2}.
ComplexMatrix abs_power(const ComplexMatrix& m, double p);

/// Matrix unit e_{i,j} of size dim, 1-based indices.
ComplexMatrix elementary(int dim, int i, int j);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

inline ComplexMatrix apply_star(const ComplexMatrix& m, bool star) {
  return star ? ComplexMatrix(m.adjoint()) : m;
}

/// Normalized Hilbert-Schmidt norm ||m||_2 = tr(m* m)^{1/2}.
double normalized_hs_norm(const ComplexMatrix& m);

/// Normalized Hilbert-Schmidt inner product tr(a* b).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace ncm
