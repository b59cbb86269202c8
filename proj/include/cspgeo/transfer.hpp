#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cspgeo/instances.hpp"
#include "cspgeo/landscape.hpp"

namespace cspgeo {

/// One ensemble at fixed size. For coloring k is the number of colors, for SAT and
/// NAE it is the constraint width.
struct EnsembleParams {
  Ensemble ensemble = Ensemble::coloring;
  unsigned n = 0;
  std::uint64_t m = 0;
  unsigned k = 3;
  SamplingOptions sampling{};
  PlantOptions planting{};
};

Instance generate_uniform(const EnsembleParams& p, Seed seed);

struct PlantedPair {
  Instance instance;
  Assignment planted;
};
PlantedPair generate_planted(const EnsembleParams& p, Seed seed);

enum class Provenance { uniform, planted };
std::string_view to_string(Provenance p);

struct PairSample {
  Instance instance;
  std::optional<Assignment> solution;  // absent: the uniform instance had no solution
  Provenance provenance = Provenance::uniform;
  Seed seed{};

  [[nodiscard]] bool empty() const noexcept { return !solution.has_value(); }
};

/// Instance from stream 0 of the seed, then a uniform solution drawn with stream 1.
PairSample sample_uniform_pair(const EnsembleParams& p, Seed seed,
                               std::uint64_t budget = kDefaultEnumerationBudget);
PairSample sample_planted_pair(const EnsembleParams& p, Seed seed);

// Incidence balance ---------------------------------------------------------------------

struct IncidenceOptions {
  /// NAE only: constraints are signed k-clauses satisfied when their literals are not all
  /// equal, instead of unsigned hyperedges.
  bool signed_nae = false;
  std::uint64_t budget = std::uint64_t{1} << 26;
  /// Sampled mode (used when exact mode is out of budget): instances and assignments drawn.
  std::uint64_t samples = 0;
  Seed seed{0xBA1A};
};

struct IncidenceReport {
  bool exact = true;
  bool signed_nae = false;
  std::uint64_t assignments = 0;  // k^n, or sampled rows
  std::uint64_t instances = 0;    // C(|universe|, m), or sampled columns
  std::vector<std::uint64_t> row_weights;              // per assignment, lexicographic order
  std::vector<std::uint64_t> row_weights_closed_form;  // C(compatible(sigma), m)
  bool rows_match_closed_form = true;
  bool rows_equal = true;
  std::uint64_t row_total = 0;
  std::uint64_t column_total = 0;
  std::vector<std::uint64_t> column_weights;           // per instance |S(I)|
  double column_mean = 0;
  double column_variance = 0;
  /// Fraction of columns with weight >= c * mean for c = 0.1, 0.5, 1.
  std::vector<double> thresholds{0.1, 0.5, 1.0};
  std::vector<double> fraction_at_least;
};

IncidenceReport incidence_balance(const EnsembleParams& p, IncidenceOptions opts = {});

// Distribution comparison ------------------------------------------------------------------

struct StatisticSummary {
  std::string name;
  std::vector<double> uniform_values;
  std::vector<double> planted_values;
  std::uint64_t uniform_attempts = 0;
  std::uint64_t uniform_empty = 0;  // uniform instances without solutions (not resampled)
  std::string binning_rule;
  std::vector<double> bin_edges;    // shared by both samples
  std::vector<std::uint64_t> uniform_counts;
  std::vector<std::uint64_t> planted_counts;
  double tv = 0;
  double p_value = 1;
  unsigned permutations = 0;
  bool degenerate = false;          // constant statistic
};

using StatisticFn = std::function<double(const PairSample&)>;

/// Bins both samples jointly (Freedman-Diaconis; equal-width Sturges bins when the pooled
/// IQR is 0) and reports TV and a permutation p-value (1 + #{TV* >= TV}) / (1 + P).
StatisticSummary summarize_statistic(std::string name, std::vector<double> uniform_values,
                                     std::vector<double> planted_values, unsigned permutations, Seed seed);

struct CompareOptions {
  unsigned permutations = 999;
  std::uint64_t budget = kDefaultEnumerationBudget;
};

/// Draws `samples` uniform attempts (seeds derive(seed, 0) -> t) and `samples` planted
/// pairs (derive(seed, 1) -> t); empty uniform attempts are counted and dropped.
StatisticSummary compare_statistic(const std::string& name, const StatisticFn& statistic, const EnsembleParams& p,
                                   std::uint64_t samples, Seed seed, CompareOptions opts = {});

/// Variables whose every value is reachable within distance `radius` (geometry
/// classify_variables); a ready-made statistic for compare_statistic.
StatisticFn loose_variable_statistic(std::uint32_t radius, std::uint64_t budget = kDefaultEnumerationBudget);

// Concentration --------------------------------------------------------------------------

struct ConcentrationTrial {
  std::uint64_t trial = 0;
  Seed seed{};
  std::uint64_t solutions = 0;
  double log_per_n = 0;  // n^-1 ln |S|, -inf when empty
  bool below_sat_bound = false;
};

struct ConcentrationReport {
  EnsembleParams params;
  std::vector<ConcentrationTrial> trials;
  std::uint64_t nonempty = 0;
  double conditioning_rate = 0;     // nonempty / trials
  double mean = 0;                  // over nonempty trials
  double median = 0;
  double q1 = 0;
  double q3 = 0;
  double iqr = 0;
  double log_expectation_per_n = 0;  // exact n^-1 ln E|S|
  /// SAT only: fraction of trials with |S| < mu exp(-k 2^(3-k) n).
  std::optional<double> sat_bound_violation_rate;
};

/// Trial t uses instance seed derive(seed, t). threads = 0 means hardware concurrency.
ConcentrationReport concentration_check(const EnsembleParams& p, std::uint64_t trials, Seed seed,
                                        std::uint64_t budget = kDefaultEnumerationBudget, unsigned threads = 1);

void write_concentration_csv(std::ostream& out, const ConcentrationReport& r);

/// Linear-interpolation quantile of sorted data (q in [0,1]).
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace cspgeo
