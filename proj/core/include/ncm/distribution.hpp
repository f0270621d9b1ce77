#pragma once

// *-distributions of finite families, linear maps given on a spanning set,
// and the probes and defect functionals built on them.

#include "ncm/matrix.hpp"
#include "ncm/reconstruction.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ncm {

/// Upper bound on the number of words a table or enumeration may hold.
inline constexpr double kWordGuard = 1e6;

/// Number of star words of length <= maxdeg over `family_size` letters,
/// including the empty word.
double word_count(int family_size, int maxdeg);

/// Every star word of length <= maxdeg, by length, then lexicographically.
/// Throws GuardExceededError above kWordGuard.
std::vector<StarWord> enumerate_words(int family_size, int maxdeg);

/// Keys are words as written; no cyclic reduction is applied.
struct MomentTable {
  int maxdeg = 0;
  int family_size = 0;
  std::map<StarWord, Complex> entries;

  /// Throws std::out_of_range for words outside the table.
  Complex at(const StarWord& word) const;
  std::size_t size() const { return entries.size(); }
};

MomentTable star_moments(std::span<const ComplexMatrix> family, int maxdeg);

struct ReconstructedTable {
  MomentTable table;
  double max_residual = 0.0;
};

/// The same table, with every nonempty entry recovered from p-norms only.
ReconstructedTable reconstructed_moments(std::span<const ComplexMatrix> family, int maxdeg,
                                         double p, const ReconstructOptions& options = {});

struct DistributionComparison {
  bool pass = true;
  StarWord worst_word;
  double worst_gap = 0.0;
  double tolerance = 0.0;
};

/// Throws std::invalid_argument when the tables differ in shape.
DistributionComparison distributions_match(const MomentTable& a, const MomentTable& b, double tol);

/// Threshold on the Hilbert-Schmidt least-squares residual for span membership.
inline constexpr double kSpanResidualTolerance = 1e-8;
/// Largest accepted condition number of the basis Gram matrix.
inline constexpr double kGramConditionLimit = 1e8;

/// A linear map u given by its values on a linearly independent spanning set.
class SpanMap {
 public:
  /// Validates independence, equal lengths, and the unital condition
  /// (identity in the span and mapped to the identity). Throws
  /// std::invalid_argument on violation.
  SpanMap(std::vector<ComplexMatrix> basis, std::vector<ComplexMatrix> images, bool unital);

  /// u = identity on the span of `basis`.
  static SpanMap identity(std::vector<ComplexMatrix> basis, bool unital);
  /// x -> U x U^* on the span of `basis`.
  static SpanMap conjugation(std::vector<ComplexMatrix> basis, const ComplexMatrix& unitary, bool unital);
  /// x -> x^T on all of M_dim, basis e_{ij} in row-major order.
  static SpanMap transposition(int dim);

  const std::vector<ComplexMatrix>& basis() const noexcept { return basis_; }
  const std::vector<ComplexMatrix>& images() const noexcept { return images_; }
  bool unital() const noexcept { return unital_; }
  int size() const noexcept { return static_cast<int>(basis_.size()); }
  int domain_dim() const noexcept { return domain_dim_; }
  int image_dim() const noexcept { return image_dim_; }
  double gram_condition() const noexcept { return gram_condition_; }

  struct Coordinates {
    Eigen::VectorXcd coefficients;
    /// ||x - sum c_k b_k||_2 / max(1, ||x||_2).
    double residual = 0.0;
  };

  /// Hilbert-Schmidt least-squares coordinates of x in the basis.
  Coordinates coordinates(const ComplexMatrix& x) const;

  /// sum_k c_k u(b_k).
  ComplexMatrix apply_coefficients(const Eigen::VectorXcd& c) const;

  /// u(x), or nullopt when x is not in the span.
  std::optional<ComplexMatrix> apply(const ComplexMatrix& x) const;

 private:
  std::vector<ComplexMatrix> basis_;
  std::vector<ComplexMatrix> images_;
  bool unital_ = false;
  int domain_dim_ = 0;
  int image_dim_ = 0;
  double gram_condition_ = 1.0;
  Eigen::MatrixXcd stacked_;  // column k = vec(b_k)
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr_;
};

struct IsometryProbeReport {
  int level = 1;
  double p = 1.0;
  int trials = 0;
  std::uint64_t seed = 0;
  int ascent_steps = 0;
  double max_gap = 0.0;        // after ascent
  double sampled_gap = 0.0;    // best gap among the random trials alone
  /// Coefficients c[(i*level + j)*size + k] of the witness X = sum e_ij (x) c b_k.
  std::vector<Complex> witness_coefficients;
  ComplexMatrix witness;        // X in M_level (x) M_domain
  ComplexMatrix witness_image;  // (id (x) u) X
};

inline constexpr int kProbeAscentSteps = 50;

/// Seeded search for a level-`level` X with ||1 + X||_p != ||1 + (id (x) u) X||_p.
/// Coefficients lie in the closed unit disc. The best trial is refined by
/// coordinate ascent on the gap.
IsometryProbeReport complete_isometry_probe(const SpanMap& u, int level, double p, int trials,
                                            std::uint64_t seed, int ascent_steps = kProbeAscentSteps);

/// ||u(ab) - u(a)u(b)||_2^2 for basis elements a = b_{a_idx}, b = b_{b_idx}
/// (0-based), assembled from four traces. With use_oracle the traces are
/// reconstructed from p-norms of the images; p = 2 and p = 4 are refused.
double multiplicativity_defect(const SpanMap& u, int a_idx, int b_idx, double p, bool use_oracle,
                               const ReconstructOptions& options = {});

/// ||u(x^*) - u(x)^*||_2 for x = b_{x_idx} (0-based).
double adjoint_defect(const SpanMap& u, int x_idx);

struct LinearizationReport {
  bool pass = true;
  int words_checked = 0;
  StarWord worst_word;
  double worst_gap = 0.0;        // |tau_x(word) - tau_y(word)| read off the extracted coefficients
  double extraction_error = 0.0; // max |extracted coefficient - direct word trace|
  double moment_gap = 0.0;       // max gap of tr(S^k) at sampled z
  double tolerance = 0.0;
};

/// For Hermitian families, extracts tau(x_{i1} ... x_{ik}) as the exact
/// coefficient of z_1 ... z_k in tr((sum_j a_j (x) x_{ij})^k), where
/// a_j = z_j e_{j,j+1} + conj(z_j) e_{j+1,j} (indices mod k), and compares the
/// two families word by word. Throws std::invalid_argument on non-Hermitian
/// input and GuardExceededError for maxdeg > 8.
LinearizationReport selfadjoint_linearization_check(std::span<const ComplexMatrix> x_family,
                                                    std::span<const ComplexMatrix> y_family,
                                                    int maxdeg, double tol, std::uint64_t seed = 0);

}  // namespace ncm
