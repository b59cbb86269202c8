#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cspgeo/instances.hpp"

namespace cspgeo {

// ---------------------------------------------------------------------------
// Recoloring process (looseness below the transition)
// ---------------------------------------------------------------------------

struct DeadVertex {
  std::uint32_t vertex = 0;
  /// True if the vertex had at least q colors with no neighbor and woke nobody.
  bool had_free_colors = false;
  /// c_1(w)..c_q(w), ascending. For v0 this is the target color alone.
  std::vector<std::uint8_t> colors;
  /// Asleep neighbors woken by this vertex, in wake order.
  std::vector<std::uint32_t> woke;
};

struct RecolorTrace {
  std::uint32_t v0 = 0;
  std::uint8_t target = 0;
  unsigned q = 5;
  std::vector<DeadVertex> dead;  // kill order; dead[0] is v0
  std::optional<Assignment> tau;
  std::string failure;  // empty on success
  std::uint64_t list_coloring_nodes = 0;

  [[nodiscard]] bool success() const noexcept { return tau.has_value(); }
};

struct RecolorOptions {
  unsigned q = 5;
  std::uint64_t list_coloring_budget = std::uint64_t{1} << 22;
};

/// Tries to move v0 to `target` by the awake/dead/asleep process followed by a
/// backtracking list coloring of the dead set. Awake vertices are processed FIFO.
RecolorTrace recolor_process(const GraphInstance& g, const Assignment& sigma, std::uint32_t v0,
                             std::uint8_t target, Seed seed, RecolorOptions opts = {});

// ---------------------------------------------------------------------------
// Core constructions (rigidity above the transition)
// ---------------------------------------------------------------------------

enum class CorePhase { W, U, Z, Z0 };

std::string_view to_string(CorePhase p);

struct Removal {
  std::uint32_t variable = 0;
  CorePhase phase = CorePhase::W;

  friend bool operator==(const Removal&, const Removal&) = default;
};

struct CoreResult {
  std::vector<std::uint32_t> core;   // surviving variables, ascending
  std::vector<Removal> removals;     // in removal order
  double gamma = 0.0;
  double beta = 0.0;                 // threshold factor used by the verification
  bool verified = false;             // every core variable passes the verification
  std::vector<std::uint32_t> failing;  // core variables failing the verification
  /// Support core only: verification under the unrestricted-occurrence reading.
  std::optional<bool> occurrence_reading_verified;

  [[nodiscard]] double core_fraction(unsigned n) const noexcept {
    return n == 0 ? 0.0 : static_cast<double>(core.size()) / n;
  }

  friend bool operator==(const CoreResult&, const CoreResult&) = default;
};

struct StripOptions {
  /// Step 3 adds a vertex with at least this many neighbors in Z.
  unsigned z_neighbor_threshold = 10;
};

/// Four-step stripping: W (few neighbors in some other class), U (many neighbors in
/// some W_i), Z (closure of U under "at least 10 neighbors in Z"), core = V - W - Z.
/// Verifies that every core vertex has at least (gamma/2) ln k core neighbors in
/// every other color class.
CoreResult strip_core_coloring(const GraphInstance& g, const Assignment& sigma, double gamma,
                               StripOptions opts = {});

/// Number of clauses in which `variable` carries the unique true literal.
std::size_t support_count(const CnfInstance& f, const Assignment& sigma, std::uint32_t variable);

/// Z0 = variables supporting fewer than 2 gamma ln k clauses; Z grows by variables
/// supporting at least gamma ln k clauses that touch Z; core U = V - Z. Verifies that
/// every variable of U supports at least gamma ln k clauses lying entirely inside U.
CoreResult support_core_sat(const CnfInstance& f, const Assignment& sigma, double gamma);

// ---------------------------------------------------------------------------
// Sparsity witnesses
// ---------------------------------------------------------------------------

struct SparsityOptions {
  unsigned exhaustive_max_n = 20;
  unsigned heuristic_restarts = 64;
  Seed seed{0x5EED};
};

struct SparsityResult {
  bool violated = false;           // some S with |S| <= bound spans >= |S| * factor constraints
  bool exhaustive = true;          // false: randomized search, absence of a witness is heuristic
  std::vector<std::uint32_t> witness;  // densest violating set, else densest set seen
  std::size_t witness_constraints = 0;
  double witness_density = 0.0;    // witness_constraints / |witness|
};

/// A constraint is spanned by S when at least two of its variables lie in S (for
/// graphs: both endpoints).
SparsityResult sparsity_check(const Instance& inst, std::size_t subset_size_bound, double edge_factor,
                              SparsityOptions opts = {});

/// n / (k ln k), the subset size bound linked to rigidity.
double rigidity_size_bound(unsigned n, unsigned k);

}  // namespace cspgeo
