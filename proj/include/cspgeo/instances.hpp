#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "cspgeo/rng.hpp"

namespace cspgeo {

enum class Ensemble { coloring, sat, nae };

std::string_view to_string(Ensemble e);
Ensemble parse_ensemble(std::string_view name);

/// A point of D^n. Values are 0-based domain indices.
struct Assignment {
  std::vector<std::uint8_t> values;
  unsigned domain_size = 2;

  Assignment() = default;
  Assignment(std::vector<std::uint8_t> v, unsigned k);

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return values[i]; }
  std::uint8_t& operator[](std::size_t i) noexcept { return values[i]; }

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

std::size_t hamming_distance(const Assignment& a, const Assignment& b);

struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;  // u < v

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple graph on vertices 0..n-1 to be colored with k colors.
struct GraphInstance {
  unsigned n = 0;
  unsigned k = 2;
  std::vector<Edge> edges;  // sorted, distinct
};

struct Literal {
  std::uint32_t var = 0;
  bool negated = false;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Literals sorted by variable; variables distinct.
using Clause = std::vector<Literal>;

struct CnfInstance {
  unsigned n = 0;
  unsigned k = 3;
  std::vector<Clause> clauses;  // sorted, distinct
};

/// k-uniform hypergraph, 2-colored under the not-all-equal constraint.
struct HypergraphInstance {
  unsigned n = 0;
  unsigned k = 3;
  std::vector<std::vector<std::uint32_t>> edges;  // each ascending; list sorted, distinct
};

using Instance = std::variant<GraphInstance, CnfInstance, HypergraphInstance>;

Ensemble ensemble_of(const Instance& inst);
unsigned variable_count(const Instance& inst);
/// Number of values per variable: k for coloring, 2 otherwise.
unsigned domain_size(const Instance& inst);
std::size_t constraint_count(const Instance& inst);
/// The ensemble's width parameter (colors for coloring, arity otherwise).
unsigned width_parameter(const Instance& inst);

/// Throws ParameterError unless the structural invariants hold.
void validate(const GraphInstance& g);
void validate(const CnfInstance& f);
void validate(const HypergraphInstance& h);
void validate(const Instance& inst);
/// Throws ParameterError if `a` has the wrong length or an out-of-range value.
void validate_assignment(const Instance& inst, const Assignment& a);

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

enum class SamplingMode {
  without_replacement,  // exactly m distinct constraints, uniformly
  independent,          // each admissible constraint independently with probability p
};

struct SamplingOptions {
  SamplingMode mode = SamplingMode::without_replacement;
  /// Inclusion probability in independent mode. Negative: m divided by the number
  /// of admissible constraints, so the expected constraint count is m.
  double probability = -1.0;
};

enum class PlantBalance {
  uniform,   // sigma uniform over [k]^n
  balanced,  // class sizes differ by at most one, uniformly among such sigma
};

struct PlantOptions {
  SamplingOptions sampling;
  PlantBalance balance = PlantBalance::uniform;
  unsigned max_resamples = 100;
};

template <class I>
struct Planted {
  I instance;
  Assignment planted;
};

/// Number of constraints in the full universe (pairs, signed k-clauses, k-subsets).
std::uint64_t universe_size(Ensemble e, unsigned n, unsigned k);

/// Universe indexing: pairs and k-subsets by colex rank; a signed clause is
/// (rank << k) | signs, where bit j negates the j-th smallest variable.
Edge decode_pair(std::uint64_t idx, unsigned n);
Clause decode_clause(std::uint64_t idx, unsigned n, unsigned k);
std::vector<std::uint32_t> decode_subset(std::uint64_t idx, unsigned n, unsigned k);
/// For coloring k is the number of colors, otherwise the constraint width.
Instance instance_from_universe(Ensemble e, unsigned n, unsigned k, const std::vector<std::uint64_t>& indices);

GraphInstance gen_uniform_graph(unsigned n, std::uint64_t m, unsigned k, Seed seed, SamplingOptions opts = {});
CnfInstance gen_uniform_cnf(unsigned n, std::uint64_t m, unsigned k, Seed seed, SamplingOptions opts = {});
HypergraphInstance gen_uniform_hypergraph(unsigned n, std::uint64_t m, unsigned k, Seed seed,
                                          SamplingOptions opts = {});

/// Number of pairs {u,v} with sigma(u) != sigma(v).
std::uint64_t bichromatic_pair_count(const Assignment& sigma);
/// Number of k-subsets that are not monochromatic under a 2-coloring.
std::uint64_t nae_compatible_count(const Assignment& sigma, unsigned k);

/// m constraints sampled among those compatible with the fixed assignment.
GraphInstance plant_graph(const Assignment& sigma, std::uint64_t m, Seed seed, SamplingOptions opts = {});
CnfInstance plant_cnf(const Assignment& sigma, std::uint64_t m, unsigned k, Seed seed, SamplingOptions opts = {});
HypergraphInstance plant_hypergraph(const Assignment& sigma, std::uint64_t m, unsigned k, Seed seed,
                                    SamplingOptions opts = {});

Assignment sample_assignment(unsigned n, unsigned k, PlantBalance balance, Rng& rng);

Planted<GraphInstance> gen_planted_coloring(unsigned n, std::uint64_t m, unsigned k, Seed seed,
                                            PlantOptions opts = {});
Planted<CnfInstance> gen_planted_cnf(unsigned n, std::uint64_t m, unsigned k, Seed seed, PlantOptions opts = {});
Planted<HypergraphInstance> gen_planted_nae(unsigned n, std::uint64_t m, unsigned k, Seed seed,
                                            PlantOptions opts = {});

}  // namespace cspgeo
