#include "ncm/random.hpp"

#include <cmath>

namespace ncm {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6e636dU};
  return Rng(seq);
}

ComplexMatrix random_gaussian(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  return m;
}

ComplexMatrix random_with_norm(int dim, double norm, Rng& rng) {
  ComplexMatrix m = random_gaussian(dim, rng);
  const double current = operator_norm(m);
  return current > 0.0 ? ComplexMatrix(m * (norm / current)) : m;
}

ComplexMatrix random_hermitian(int dim, Rng& rng) {
  const ComplexMatrix g = random_gaussian(dim, rng);
  return (g + g.adjoint()) * 0.5;
}

ComplexMatrix random_unitary(int dim, Rng& rng) {
  const ComplexMatrix g = random_gaussian(dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(k) *= d / mag;
  }
  return q;
}

}  // namespace ncm
