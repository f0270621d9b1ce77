#pragma once

#include "ncm/matrix.hpp"

#include <cstdint>
#include <random>

namespace ncm {

using Rng = std::mt19937_64;

/// Independent stream `stream` of the generator family rooted at `seed`.
/// Trials draw from their own stream so results do not depend on scheduling.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
ComplexMatrix random_gaussian(int dim, Rng& rng);

/// Random matrix rescaled to operator norm exactly `norm`.
ComplexMatrix random_with_norm(int dim, double norm, Rng& rng);

ComplexMatrix random_hermitian(int dim, Rng& rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix random_unitary(int dim, Rng& rng);

}  // namespace ncm
