#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "cspgeo/algorithms.hpp"
#include "cspgeo/geometry.hpp"
#include "cspgeo/instances.hpp"
#include "cspgeo/landscape.hpp"
#include "cspgeo/moments.hpp"
#include "cspgeo/processes.hpp"
#include "cspgeo/transfer.hpp"

namespace cspgeo {

using nlohmann::json;

// Instance text format:
//   ensemble n m k
//   one constraint per line: "u v" (0-based vertices), signed 1-based literals, or a
//   0-based vertex list. Blank lines and lines starting with '#' are ignored.
void write_instance(std::ostream& out, const Instance& inst);
std::string format_instance(const Instance& inst);
/// Throws ParameterError with the offending line number on malformed input.
Instance read_instance(std::istream& in);
Instance parse_instance(const std::string& text);

void write_dimacs(std::ostream& out, const CnfInstance& f);

/// One solution per line: digits when k <= 10, otherwise space-separated values.
void write_solutions(std::ostream& out, const SolutionSet& s);
std::string format_assignment(const Assignment& a);

/// CSV solution_index,cluster_id.
void write_clusters_csv(std::ostream& out, const ClusterDecomposition& c);

/// CSV x_numerator,x_denominator,count; x = x_numerator / x_denominator = f_sigma(tau).
void write_histogram_csv(std::ostream& out, const OverlapHistogram& h);

json to_json(const Assignment& a);
json to_json(const ShatterReport& r);
json to_json(const VariableStatus& s);
json to_json(const RecolorTrace& t);
json to_json(const CoreResult& c);
json to_json(const SparsityResult& r);
json to_json(const HeuristicOutcome& h);
json to_json(const SweepRow& r);
json to_json(const OptimizerResult& r);
json to_json(const UpperBoundReport& r);
json to_json(const IncidenceReport& r);
json to_json(const StatisticSummary& s);
json to_json(const ConcentrationReport& r);

}  // namespace cspgeo
