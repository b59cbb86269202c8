#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "cspgeo/landscape.hpp"

namespace cspgeo {

/// Finite-n shattering measurements. Regions are the clusters themselves.
struct ShatterReport {
  bool empty = false;  // S(I) is empty; every other field is zero
  std::size_t solution_count = 0;
  std::size_t region_count = 0;
  double log_region_count_per_n = 0.0;  // ln(region_count) / n
  double max_region_fraction = 0.0;
  /// Absent when there is a single region.
  std::optional<std::size_t> min_interregion_distance;
  std::optional<double> min_interregion_distance_per_n;
  std::optional<unsigned> min_barrier;
  std::optional<double> min_barrier_per_n;
  bool barrier_exact = true;
  unsigned adjacency_radius = 1;
};

ShatterReport shatter_report(const SolutionSet& solutions, const ClusterDecomposition& clusters,
                             std::uint64_t barrier_budget = kDefaultEnumerationBudget);

inline constexpr std::uint32_t kUnbounded = std::numeric_limits<std::uint32_t>::max();

/// Per-variable rigidity and looseness relative to a solution sigma.
struct VariableStatus {
  /// min dist(sigma, tau) over solutions tau with tau(v) != sigma(v); kUnbounded if none.
  std::vector<std::uint32_t> rigid_distance;
  /// max over values j of the distance to the nearest solution with tau(v) = j;
  /// kUnbounded if some value is never taken.
  std::vector<std::uint32_t> loose_radius;
  /// witness[v][j]: distance to the nearest solution with tau(v) = j (kUnbounded if none).
  std::vector<std::vector<std::uint32_t>> witness;
};

VariableStatus classify_variables(const SolutionSet& solutions, const Assignment& sigma);

/// Normalized class intersections M[i][j] = |sigma^-1(i) ∩ tau^-1(j)| / n.
struct OverlapMatrix {
  unsigned k = 0;
  unsigned n = 0;
  std::vector<std::uint64_t> counts;  // row-major k*k

  [[nodiscard]] double operator()(unsigned i, unsigned j) const noexcept {
    return static_cast<double>(counts[i * k + j]) / n;
  }
  /// n^2 * f_sigma(tau), exact.
  [[nodiscard]] std::uint64_t scaled_frobenius() const noexcept;
};

OverlapMatrix overlap_matrix(const Assignment& sigma, const Assignment& tau, unsigned k);

/// Squared Frobenius norm f_sigma(tau).
double frobenius_overlap(const OverlapMatrix& m);

/// g_{sigma,G,lambda}: counts of assignments with H(tau) <= floor(lambda n), keyed by
/// the exact integer n^2 f_sigma(tau).
struct OverlapHistogram {
  unsigned n = 0;
  unsigned max_violations = 0;
  std::map<std::uint64_t, std::uint64_t> counts;

  [[nodiscard]] std::uint64_t total() const noexcept;
  [[nodiscard]] std::uint64_t denominator() const noexcept { return static_cast<std::uint64_t>(n) * n; }
};

OverlapHistogram overlap_histogram(const Instance& inst, const Assignment& sigma, double lambda,
                                   std::uint64_t budget = kDefaultEnumerationBudget);

/// Largest open interval (lo, hi) of scaled overlap values strictly between
/// `floor_key` and `ceil_key` containing no histogram key; nullopt if none is empty.
struct EmptyBand {
  std::uint64_t low_key = 0;
  std::uint64_t high_key = 0;
};
std::optional<EmptyBand> widest_empty_band(const OverlapHistogram& h, std::uint64_t floor_key,
                                           std::uint64_t ceil_key);

/// Alternative region construction: repeatedly take the smallest remaining solution
/// ordinal sigma and remove C_sigma = {tau remaining : f_sigma(tau) > y2}.
/// Returns a region id per solution ordinal.
std::vector<std::uint32_t> peel_overlap_regions(const SolutionSet& solutions, double y2);

}  // namespace cspgeo
