#pragma once

// Coefficient families a_1..a_n with tr(a_s(1) ... a_s(n)) = 1 for circular
// permutations s and 0 for every other permutation.

#include "ncm/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ncm {

enum class GadgetKind { FullCycle, Compact, Custom };

std::string to_string(GadgetKind kind);
GadgetKind parse_gadget_kind(std::string_view name);

struct GadgetFamily {
  GadgetKind kind = GadgetKind::Custom;
  int n = 0;
  int dim = 0;
  std::vector<ComplexMatrix> matrices;

  /// Wraps arbitrary matrices; checks n >= 1 and a common square dimension.
  static GadgetFamily from_matrices(std::vector<ComplexMatrix> matrices);
};

/// a_j = n^{1/n} e_{j, (j mod n)+1} in M_n.
GadgetFamily full_cycle_family(int n);

/// ceil(n/2)-dimensional family: alternating diagonal and superdiagonal units,
/// closed by m e_{m,1} where m = ceil(n/2).
GadgetFamily compact_family(int n);

/// s is circular iff s(j) = j + k mod n for some k. `perm` is 0-based.
bool is_circular(std::span<const int> perm);

/// Largest n for which verify_cyclic_trace enumerates all n! permutations.
inline constexpr int kExhaustiveGadgetLimit = 9;
inline constexpr std::size_t kDefaultGadgetSamples = 100000;

struct CyclicTraceOptions {
  double tolerance = 1e-9;
  /// When set, check this many seeded uniform permutations instead of all.
  std::optional<std::size_t> samples;
  std::uint64_t seed = 0;
};

struct CyclicTraceReport {
  bool pass = false;
  bool exhaustive = true;
  double max_deviation = 0.0;
  std::vector<int> worst_permutation;  // 1-based
  std::size_t permutations_checked = 0;
};

/// Throws GuardExceededError when n > kExhaustiveGadgetLimit without samples.
CyclicTraceReport verify_cyclic_trace(const GadgetFamily& family,
                                      const CyclicTraceOptions& options = {});

}  // namespace ncm
