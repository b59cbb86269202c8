#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cspgeo/instances.hpp"

namespace cspgeo {

struct FailurePoint {
  std::uint64_t step = 0;        // number of assignments made before the contradiction
  std::uint32_t where = 0;       // empty clause index (SAT) or stuck vertex (coloring)
};

struct HeuristicOutcome {
  bool success = false;
  std::optional<Assignment> assignment;
  std::uint64_t steps = 0;
  std::uint64_t forced_steps = 0;  // unit-clause steps, or vertices with one available color
  std::optional<FailurePoint> failure;
};

/// Unit-clause rule without backtracking. Among unit clauses the smallest clause index
/// is satisfied first; otherwise a uniformly random unassigned variable gets a fair
/// coin value. At most n steps are taken.
HeuristicOutcome unit_clause_solve(const CnfInstance& f, Seed seed);

/// Fewest-available-colors greedy coloring: a uniformly random uncolored vertex of
/// minimum available-set size gets a uniformly random available color. At most n
/// steps are taken. Requires k <= 64.
HeuristicOutcome greedy_color(const GraphInstance& g, Seed seed);

/// Wilson score interval at 95%.
struct Interval {
  double low = 0.0;
  double high = 1.0;
};
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct SweepParams {
  Ensemble ensemble = Ensemble::sat;  // coloring runs greedy_color, sat runs unit_clause_solve
  unsigned n = 0;
  unsigned k = 3;
};

struct SweepRow {
  Ensemble ensemble = Ensemble::sat;
  unsigned n = 0;
  unsigned k = 0;
  double density = 0.0;
  std::uint64_t m = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double ci_low = 0.0;
  double ci_high = 1.0;

  [[nodiscard]] double rate() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  }
};

/// Constraint count for a density: coloring uses average degree d (m = round(d n / 2)),
/// SAT and NAE use clause density r (m = round(r n)).
std::uint64_t constraints_for_density(Ensemble e, unsigned n, double density);

/// Trial t at grid point g uses seed derive(derive(seed, g), t); its instance draws from
/// stream 0 and the heuristic from stream 1. threads = 0 means hardware concurrency.
std::vector<SweepRow> density_sweep(const SweepParams& params, const std::vector<double>& grid,
                                    std::uint64_t trials, Seed seed, unsigned threads = 1);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace cspgeo
