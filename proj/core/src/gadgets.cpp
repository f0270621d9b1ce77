#include "ncm/gadgets.hpp"

#include "ncm/errors.hpp"
#include "ncm/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ncm {

std::string to_string(GadgetKind kind) {
  switch (kind) {
    case GadgetKind::FullCycle: return "full";
    case GadgetKind::Compact: return "compact";
    case GadgetKind::Custom: return "custom";
  }
  return "custom";
}

GadgetKind parse_gadget_kind(std::string_view name) {
  if (name == "full") return GadgetKind::FullCycle;
  if (name == "compact") return GadgetKind::Compact;
  throw std::invalid_argument("unknown gadget kind '" + std::string(name) + "' (full|compact)");
}

GadgetFamily GadgetFamily::from_matrices(std::vector<ComplexMatrix> matrices) {
  if (matrices.empty()) throw std::invalid_argument("gadget family needs at least one matrix");
  const auto dim = matrices.front().rows();
  for (const auto& m : matrices) {
    require_square(m, "gadget matrix");
    if (m.rows() != dim) throw std::invalid_argument("gadget matrices must share one dimension");
  }
  GadgetFamily family;
  family.n = static_cast<int>(matrices.size());
  family.dim = static_cast<int>(dim);
  family.matrices = std::move(matrices);
  return family;
}

GadgetFamily full_cycle_family(int n) {
  if (n < 1) throw std::invalid_argument("full_cycle_family: n must be >= 1");
  const double scale = std::pow(static_cast<double>(n), 1.0 / n);
  std::vector<ComplexMatrix> mats;
  mats.reserve(n);
  for (int j = 1; j <= n; ++j) mats.push_back(scale * elementary(n, j, (j % n) + 1));
  GadgetFamily family = GadgetFamily::from_matrices(std::move(mats));
  family.kind = GadgetKind::FullCycle;
  return family;
}

GadgetFamily compact_family(int n) {
  if (n < 1) throw std::invalid_argument("compact_family: n must be >= 1");
  const int m = (n + 1) / 2;
  std::vector<ComplexMatrix> mats(n);
  // Odd positions 2j-1 carry e_{j,j}; even positions 2j carry e_{j,j+1}. The
  // last matrix closes the cycle with weight m.
  for (int j = 1; 2 * j - 1 < n; ++j) mats[2 * j - 2] = elementary(m, j, j);
  for (int j = 1; 2 * j < n; ++j) mats[2 * j - 1] = elementary(m, j, j + 1);
  mats[n - 1] = static_cast<double>(m) * elementary(m, m, 1);
  GadgetFamily family = GadgetFamily::from_matrices(std::move(mats));
  family.kind = GadgetKind::Compact;
  return family;
}

bool is_circular(std::span<const int> perm) {
  const int n = static_cast<int>(perm.size());
  if (n == 0) return true;
  const int shift = perm[0];
  for (int j = 0; j < n; ++j)
    if (perm[j] != (j + shift) % n) return false;
  return true;
}

namespace {

struct Tracker {
  double tolerance = 0.0;
  double worst = -1.0;
  std::vector<int> worst_perm;
  std::size_t checked = 0;

  void record(std::span<const int> perm, Complex trace) {
    const double expected = is_circular(perm) ? 1.0 : 0.0;
    const double dev = std::abs(trace - expected);
    ++checked;
    if (dev > worst || std::isnan(dev)) {
      worst = std::isnan(dev) ? std::numeric_limits<double>::infinity() : dev;
      worst_perm.assign(perm.begin(), perm.end());
    }
  }
};

// Depth-first over permutations, reusing prefix products. The last factor
// only needs the trace of prefix * a, which costs O(dim^2).
void exhaustive(const GadgetFamily& fam, Tracker& tracker) {
  const int n = fam.n;
  const double inv_dim = 1.0 / fam.dim;
  std::vector<int> perm(n);
  std::vector<bool> used(n, false);
  std::vector<ComplexMatrix> prefix(n + 1, ComplexMatrix::Identity(fam.dim, fam.dim));

  auto recurse = [&](auto& self, int depth) -> void {
    if (depth == n - 1) {
      int last = 0;
      while (used[last]) ++last;
      perm[depth] = last;
      const Complex tr =
          (prefix[depth].array() * fam.matrices[last].transpose().array()).sum() * inv_dim;
      tracker.record(perm, tr);
      return;
    }
    for (int c = 0; c < n; ++c) {
      if (used[c]) continue;
      used[c] = true;
      perm[depth] = c;
      prefix[depth + 1].noalias() = prefix[depth] * fam.matrices[c];
      self(self, depth + 1);
      used[c] = false;
    }
  };
  recurse(recurse, 0);
}

void sampled(const GadgetFamily& fam, std::size_t samples, std::uint64_t seed, Tracker& tracker) {
  Rng rng = make_rng(seed, 0x9adce7);
  std::vector<int> perm(fam.n);
  for (std::size_t s = 0; s < samples; ++s) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ComplexMatrix product = fam.matrices[perm[0]];
    for (int j = 1; j < fam.n; ++j) product = product * fam.matrices[perm[j]];
    tracker.record(perm, product.trace() / static_cast<double>(fam.dim));
  }
}

}  // namespace

CyclicTraceReport verify_cyclic_trace(const GadgetFamily& family, const CyclicTraceOptions& options) {
  if (family.n < 1 || static_cast<int>(family.matrices.size()) != family.n)
    throw std::invalid_argument("verify_cyclic_trace: malformed gadget family");
  Tracker tracker;
  tracker.tolerance = options.tolerance;
  CyclicTraceReport report;
  if (options.samples) {
    report.exhaustive = false;
    sampled(family, *options.samples, options.seed, tracker);
  } else {
    if (family.n > kExhaustiveGadgetLimit)
      throw GuardExceededError("verify_cyclic_trace: exhaustive mode refused for n = " +
                               std::to_string(family.n) + " > " +
                               std::to_string(kExhaustiveGadgetLimit) + "; request sampling");
    if (family.n == 1) {
      const std::vector<int> id{0};
      tracker.record(id, normalized_trace(family.matrices[0]));
    } else {
      exhaustive(family, tracker);
    }
  }
  report.max_deviation = std::max(tracker.worst, 0.0);
  report.permutations_checked = tracker.checked;
  report.worst_permutation = tracker.worst_perm;
  for (int& v : report.worst_permutation) ++v;
  report.pass = report.max_deviation <= options.tolerance;
  return report;
}

}  // namespace ncm
