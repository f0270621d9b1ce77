#pragma once

// Recovery of *-moments tau(x_{i1}^{e1} ... x_{in}^{en}) from p-norms of
//
//     S_z = 1 + sum_j z_j a_j^{e_j} (x) x_{i_j},
//
// where a_1..a_n is a cyclic-trace gadget. The coefficient of prod z_j^{e_j}
// in ||S_z||_p^p equals the moment times C(p, n, alpha). It is isolated by a
// discrete Fourier average over a roots-of-unity torus of radius r and then
// extrapolated to r -> 0.

#include "ncm/gadgets.hpp"
#include "ncm/matrix.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace ncm {

struct OracleInfo {
  double p = 1.0;
  int arity = 0;
  int gadget_dim = 0;
  int element_dim = 0;
  /// Radii below this keep the binomial series of |S_z|^p absolutely convergent.
  double admissible_radius = std::numeric_limits<double>::infinity();
};

/// z in C^n -> ||S_z||_p^p. The only channel the reconstruction uses.
///
/// Oracles are immutable and stateless; evaluate() may be called concurrently.
class NormOracle {
 public:
  using Function = std::function<double(std::span<const Complex>)>;

  /// `deviation` returns ||S_z||_p^p - 1.
  NormOracle(OracleInfo info, Function deviation);

  /// Wraps a callable that returns ||S_z||_p^p itself.
  static NormOracle from_norm_power(OracleInfo info, Function norm_power);

  double evaluate(std::span<const Complex> z) const { return 1.0 + deviation_(z); }
  double deviation(std::span<const Complex> z) const { return deviation_(z); }

  const OracleInfo& info() const noexcept { return info_; }
  int arity() const noexcept { return info_.arity; }

 private:
  OracleInfo info_;
  Function deviation_;
};

/// r (n^2 + 2n) max_j(||a_j|| ||x_j||, ||a_j||^2 ||x_j||^2) < 1/2, and r <= 1.
double admissible_radius(const GadgetFamily& gadget, std::span<const ComplexMatrix> elements,
                         const StarWord& word);

/// Builds the oracle for S_z. Letter j of `word` selects the element
/// elements[index-1] and whether a_j or a_j^* is the coefficient.
///
/// Evaluation diagonalizes S_z^* S_z - 1 directly, so the returned deviation
/// stays accurate relative to the size of the perturbation.
NormOracle make_norm_oracle(const GadgetFamily& gadget, std::span<const ComplexMatrix> elements,
                            const StarWord& word, double p);

/// Exact coefficient of z^e in (S_z^* S_z - 1)^k, as a matrix on
/// C^{gadget.dim} (x) C^{element dim}. Its normalized trace equals
/// tau(word) k binom(alpha, n - k) whenever the gadget has the cyclic-trace
/// property. Refuses n k > 20 with GuardExceededError.
ComplexMatrix gram_deviation_coefficient(const GadgetFamily& gadget,
                                         std::span<const ComplexMatrix> elements,
                                         const StarWord& word, int k);

/// (1/q^n) sum_m ||S_{r w^m}||_p^p prod_j phase_j / r^n with w = exp(2 pi i/q);
/// the phase is w^{m_j} for starred letters and its conjugate otherwise.
/// Approximates C(p, n, alpha) tau(word); the error is a series in r^2 when q
/// is even or q >= 2n + 3, and in r otherwise.
Complex fourier_moment_estimate(const NormOracle& oracle, const StarWord& word, double r, int q);

/// True when the Fourier estimate's error expands in powers of r^2.
bool error_is_even_in_r(int q, int n);

struct ExtrapolationPlan {
  std::vector<double> radii;  // strictly decreasing
  int q = 3;
  int richardson_order = 2;
  /// Largest acceptable extrapolation residual on the moment scale.
  double tolerance = 1e-3;

  /// q = 2n + 3; r_0 = admissible / 2 followed by three halvings; order 2.
  static ExtrapolationPlan default_for(const OracleInfo& info);
};

struct MomentEstimate {
  Complex value;
  double residual = 0.0;
  double coefficient = 0.0;
  std::vector<Complex> raw;  // Fourier estimates per radius, before division
};

/// Richardson-extrapolates fourier_moment_estimate over plan.radii and divides
/// by C(p, n, alpha). Throws ZeroCoefficientError when C vanishes and
/// NonConvergenceError when the residual exceeds plan.tolerance.
MomentEstimate extrapolated_moment(const NormOracle& oracle, const StarWord& word, double p,
                                   const ExtrapolationPlan& plan);

/// Neville-Richardson limit of `values` sampled at step sizes `h` (h -> 0),
/// eliminating `order` powers of h. Returns {limit, residual}.
std::pair<Complex, double> richardson_limit(std::span<const double> h,
                                            std::span<const Complex> values, int order);

struct ReconstructOptions {
  std::optional<int> q;
  std::optional<std::vector<double>> radii;
  /// r_0 as a fraction of the admissible radius; ignored when radii is set.
  std::optional<double> radius_fraction;
  int richardson_order = 2;
  double tolerance = 1e-3;
};

struct Reconstruction {
  Complex estimate;
  double residual = 0.0;
  /// Product of the rescaling factors applied to the letters of the word.
  double scale = 1.0;
};

/// Full pipeline on a family: rescale elements to operator norm 1, build the
/// compact-gadget oracle, extrapolate, undo the rescaling.
Reconstruction reconstruct_word_trace(std::span<const ComplexMatrix> family, const StarWord& word,
                                      double p, const ReconstructOptions& options = {});

}  // namespace ncm
