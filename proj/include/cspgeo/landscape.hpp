#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cspgeo/instances.hpp"

namespace cspgeo {

inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1} << 26;

/// Flat constraint representation shared by every landscape scan.
class CompiledInstance {
 public:
  explicit CompiledInstance(const Instance& inst);

  [[nodiscard]] unsigned variable_count() const noexcept { return n_; }
  [[nodiscard]] unsigned domain_size() const noexcept { return k_; }
  [[nodiscard]] std::size_t constraint_count() const noexcept { return offsets_.size() - 1; }
  [[nodiscard]] Ensemble ensemble() const noexcept { return ensemble_; }

  [[nodiscard]] std::span<const std::uint32_t> scope(std::size_t c) const noexcept {
    return {vars_.data() + offsets_[c], offsets_[c + 1] - offsets_[c]};
  }
  [[nodiscard]] std::span<const std::uint32_t> occurrences(std::uint32_t v) const noexcept { return occ_[v]; }
  /// Constraints whose largest variable is v; fully assigned once 0..v are set.
  [[nodiscard]] std::span<const std::uint32_t> closing(std::uint32_t v) const noexcept { return closing_[v]; }

  [[nodiscard]] bool violated(std::size_t c, const std::uint8_t* values) const noexcept;
  [[nodiscard]] unsigned energy(const std::uint8_t* values) const noexcept;
  /// H(values with v := value) - H(values).
  [[nodiscard]] int change_delta(std::uint32_t v, std::uint8_t value, std::uint8_t* values) const noexcept;

 private:
  Ensemble ensemble_;
  unsigned n_ = 0;
  unsigned k_ = 2;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> vars_;
  std::vector<std::uint8_t> negated_;
  std::vector<std::vector<std::uint32_t>> occ_;
  std::vector<std::vector<std::uint32_t>> closing_;
};

/// H_I(sigma): number of violated constraints.
unsigned violated_count(const Instance& inst, const Assignment& a);

/// Fixed-width digit packing of assignments into 64-bit codes. Variable 0 occupies the
/// most significant field, so numeric order of codes is lexicographic order.
class PackedLayout {
 public:
  PackedLayout(unsigned n, unsigned k);

  [[nodiscard]] unsigned variable_count() const noexcept { return n_; }
  [[nodiscard]] unsigned domain_size() const noexcept { return k_; }
  [[nodiscard]] unsigned width() const noexcept { return width_; }

  [[nodiscard]] std::uint64_t encode(std::span<const std::uint8_t> values) const noexcept;
  void decode(std::uint64_t code, std::span<std::uint8_t> out) const noexcept;
  [[nodiscard]] unsigned digit(std::uint64_t code, unsigned var) const noexcept {
    return static_cast<unsigned>((code >> shift(var)) & field_mask_);
  }
  [[nodiscard]] std::uint64_t with_digit(std::uint64_t code, unsigned var, unsigned value) const noexcept {
    const unsigned s = shift(var);
    return (code & ~(field_mask_ << s)) | (static_cast<std::uint64_t>(value) << s);
  }
  [[nodiscard]] unsigned hamming(std::uint64_t a, std::uint64_t b) const noexcept;

 private:
  [[nodiscard]] unsigned shift(unsigned var) const noexcept { return (n_ - 1 - var) * width_; }

  unsigned n_;
  unsigned k_;
  unsigned width_;
  std::uint64_t field_mask_;
  std::uint64_t low_bits_;
};

/// The exact solution set S(I), stored as packed codes with a sorted membership index.
class SolutionSet {
 public:
  /// Codes may come in any order; every code must be a distinct zero-energy assignment.
  SolutionSet(Instance inst, std::vector<std::uint64_t> codes);

  [[nodiscard]] const Instance& instance() const noexcept { return instance_; }
  [[nodiscard]] const PackedLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] std::size_t size() const noexcept { return codes_.size(); }
  [[nodiscard]] bool empty() const noexcept { return codes_.empty(); }
  [[nodiscard]] std::uint64_t code(std::size_t i) const noexcept { return codes_[i]; }
  [[nodiscard]] std::span<const std::uint64_t> codes() const noexcept { return codes_; }
  [[nodiscard]] Assignment assignment(std::size_t i) const;

  [[nodiscard]] std::optional<std::size_t> find(std::uint64_t code) const noexcept;
  [[nodiscard]] std::optional<std::size_t> find(const Assignment& a) const;

 private:
  Instance instance_;
  PackedLayout layout_;
  std::vector<std::uint64_t> codes_;
  std::vector<std::uint32_t> by_code_;  // ordinals sorted by code
};

/// All solutions, lexicographically ordered, by depth-first search that prunes as
/// soon as a fully assigned constraint is violated. `budget` caps the number of
/// search nodes; exceeding it throws ResourceError.
SolutionSet enumerate_solutions(const Instance& inst, std::uint64_t budget = kDefaultEnumerationBudget);

struct ClusterDecomposition {
  std::vector<std::uint32_t> cluster_of;  // per solution ordinal
  std::vector<std::uint64_t> sizes;       // per cluster id
  unsigned radius = 1;
  bool empty = false;  // decomposition of an empty solution set

  [[nodiscard]] std::size_t cluster_count() const noexcept { return sizes.size(); }
};

/// Connected components of S(I) under "Hamming distance <= radius". Cluster ids are
/// numbered by their smallest member ordinal.
ClusterDecomposition cluster_decomposition(const SolutionSet& solutions, unsigned radius = 1);

/// Minimum over unit-step paths from sigma to tau of the maximum energy along the path.
unsigned path_height(const Instance& inst, const Assignment& sigma, const Assignment& tau,
                     std::uint64_t budget = kDefaultEnumerationBudget);

/// Minimum Hamming distance between solutions in distinct clusters.
std::size_t min_intercluster_distance(const SolutionSet& solutions, const ClusterDecomposition& clusters);

/// Smallest barrier between any two distinct clusters: the lowest level h at which the
/// sublevel set {H <= h} (unit-step adjacency) joins solutions of two clusters.
/// Exact; sweeps all k^n states, which must not exceed `budget`.
unsigned min_intercluster_barrier(const SolutionSet& solutions, const ClusterDecomposition& clusters,
                                  std::uint64_t budget = kDefaultEnumerationBudget);

/// Calls visit(values, energy) for every assignment of D^n in lexicographic order,
/// updating the energy incrementally. Throws ResourceError if k^n > budget.
template <class Visit>
void for_each_assignment(const CompiledInstance& ci, std::uint64_t budget, Visit&& visit);

/// k^n, or ResourceError when it exceeds `budget`.
std::uint64_t state_space_size(unsigned n, unsigned k, std::uint64_t budget);

}  // namespace cspgeo

#include "cspgeo/detail/landscape_scan.hpp"
