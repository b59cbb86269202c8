#include "cspgeo/io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "cspgeo/errors.hpp"

namespace cspgeo {

void write_instance(std::ostream& out, const Instance& inst) {
  out << to_string(ensemble_of(inst)) << ' ' << variable_count(inst) << ' ' << constraint_count(inst) << ' '
      << width_parameter(inst) << '\n';
  std::visit(
      [&](const auto& i) {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, GraphInstance>) {
          for (const auto& e : i.edges) {
            out << e.u << ' ' << e.v << '\n';
          }
        } else if constexpr (std::is_same_v<T, CnfInstance>) {
          for (const auto& c : i.clauses) {
            for (std::size_t j = 0; j < c.size(); ++j) {
              const long lit = static_cast<long>(c[j].var) + 1;
              out << (j ? " " : "") << (c[j].negated ? -lit : lit);
            }
            out << '\n';
          }
        } else {
          for (const auto& e : i.edges) {
            for (std::size_t j = 0; j < e.size(); ++j) {
              out << (j ? " " : "") << e[j];
            }
            out << '\n';
          }
        }
      },
      inst);
}

std::string format_instance(const Instance& inst) {
  std::ostringstream os;
  write_instance(os, inst);
  return os.str();
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw ParameterError("instance line " + std::to_string(line) + ": " + what);
}

std::vector<long long> read_numbers(const std::string& text, std::size_t line) {
  std::istringstream is(text);
  std::vector<long long> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      parse_fail(line, "expected an integer, got '" + tok + "'");
    }
    if (used != tok.size()) {
      parse_fail(line, "expected an integer, got '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

Instance read_instance(std::istream& in) {
  std::string text;
  std::size_t line_no = 0;
  bool have_header = false;
  Ensemble e = Ensemble::coloring;
  unsigned n = 0;
  unsigned k = 0;
  unsigned long long m = 0;
  GraphInstance g;
  CnfInstance f;
  HypergraphInstance h;
  std::size_t seen = 0;
  while (std::getline(in, text)) {
    ++line_no;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') {
      continue;
    }
    if (!have_header) {
      std::istringstream is(text);
      std::string name;
      long long nn = -1;
      long long mm = -1;
      long long kk = -1;
      std::string extra;
      if (!(is >> name >> nn >> mm >> kk) || (is >> extra) || nn < 0 || mm < 0 || kk < 0 ||
          nn > std::numeric_limits<std::uint32_t>::max() || kk > 255) {
        parse_fail(line_no, "expected header 'ensemble n m k'");
      }
      try {
        e = parse_ensemble(name);
      } catch (const ParameterError&) {
        parse_fail(line_no, "unknown ensemble '" + name + "'");
      }
      n = static_cast<unsigned>(nn);
      m = static_cast<unsigned long long>(mm);
      k = static_cast<unsigned>(kk);
      g = GraphInstance{n, k, {}};
      f = CnfInstance{n, k, {}};
      h = HypergraphInstance{n, k, {}};
      have_header = true;
      continue;
    }
    const auto nums = read_numbers(text, line_no);
    ++seen;
    if (seen > m) {
      parse_fail(line_no, "more constraints than the header declares");
    }
    switch (e) {
      case Ensemble::coloring: {
        if (nums.size() != 2 || nums[0] < 0 || nums[1] < 0 || nums[0] >= n || nums[1] >= n) {
          parse_fail(line_no, "expected an edge 'u v' with 0 <= u, v < n");
        }
        auto u = static_cast<std::uint32_t>(nums[0]);
        auto v = static_cast<std::uint32_t>(nums[1]);
        if (u > v) {
          std::swap(u, v);
        }
        g.edges.push_back(Edge{u, v});
        break;
      }
      case Ensemble::sat: {
        if (nums.size() != k) {
          parse_fail(line_no, "expected " + std::to_string(k) + " literals");
        }
        Clause c;
        for (auto lit : nums) {
          if (lit == 0 || std::llabs(lit) > n) {
            parse_fail(line_no, "literal out of range");
          }
          c.push_back(Literal{static_cast<std::uint32_t>(std::llabs(lit) - 1), lit < 0});
        }
        std::sort(c.begin(), c.end());
        f.clauses.push_back(std::move(c));
        break;
      }
      case Ensemble::nae: {
        if (nums.size() != k) {
          parse_fail(line_no, "expected " + std::to_string(k) + " vertices");
        }
        std::vector<std::uint32_t> edge;
        for (auto v : nums) {
          if (v < 0 || v >= n) {
            parse_fail(line_no, "vertex out of range");
          }
          edge.push_back(static_cast<std::uint32_t>(v));
        }
        std::sort(edge.begin(), edge.end());
        h.edges.push_back(std::move(edge));
        break;
      }
    }
  }
  if (!have_header) {
    throw ParameterError("instance: missing header");
  }
  if (seen != m) {
    throw ParameterError("instance: header declares " + std::to_string(m) + " constraints, found " +
                         std::to_string(seen));
  }
  // constraints may come in any order; duplicates are still rejected by validate
  std::sort(g.edges.begin(), g.edges.end());
  std::sort(f.clauses.begin(), f.clauses.end());
  std::sort(h.edges.begin(), h.edges.end());
  Instance inst;
  switch (e) {
    case Ensemble::coloring:
      inst = std::move(g);
      break;
    case Ensemble::sat:
      inst = std::move(f);
      break;
    case Ensemble::nae:
      inst = std::move(h);
      break;
  }
  validate(inst);
  return inst;
}

Instance parse_instance(const std::string& text) {
  std::istringstream is(text);
  return read_instance(is);
}

void write_dimacs(std::ostream& out, const CnfInstance& f) {
  out << "p cnf " << f.n << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (const auto& l : c) {
      const long lit = static_cast<long>(l.var) + 1;
      out << (l.negated ? -lit : lit) << ' ';
    }
    out << "0\n";
  }
}

std::string format_assignment(const Assignment& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.domain_size <= 10) {
      s.push_back(static_cast<char>('0' + a[i]));
    } else {
      if (i) {
        s.push_back(' ');
      }
      s += std::to_string(a[i]);
    }
  }
  return s;
}

void write_solutions(std::ostream& out, const SolutionSet& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_assignment(s.assignment(i)) << '\n';
  }
}

void write_clusters_csv(std::ostream& out, const ClusterDecomposition& c) {
  out << "solution_index,cluster_id\n";
  for (std::size_t i = 0; i < c.cluster_of.size(); ++i) {
    out << i << ',' << c.cluster_of[i] << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const OverlapHistogram& h) {
  out << "x_numerator,x_denominator,count\n";
  for (const auto& [key, count] : h.counts) {
    out << key << ',' << h.denominator() << ',' << count << '\n';
  }
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json unbounded_list(const std::vector<std::uint32_t>& v) {
  json a = json::array();
  for (auto x : v) {
    a.push_back(x == kUnbounded ? json(nullptr) : json(x));
  }
  return a;
}

}  // namespace

json to_json(const Assignment& a) { return json{{"k", a.domain_size}, {"values", a.values}}; }

json to_json(const ShatterReport& r) {
  return json{{"empty", r.empty},
              {"solution_count", r.solution_count},
              {"region_count", r.region_count},
              {"log_region_count_per_n", r.log_region_count_per_n},
              {"max_region_fraction", r.max_region_fraction},
              {"min_interregion_distance", optional_json(r.min_interregion_distance)},
              {"min_interregion_distance_per_n", optional_json(r.min_interregion_distance_per_n)},
              {"min_barrier", optional_json(r.min_barrier)},
              {"min_barrier_per_n", optional_json(r.min_barrier_per_n)},
              {"barrier_exact", r.barrier_exact},
              {"adjacency_radius", r.adjacency_radius}};
}

json to_json(const VariableStatus& s) {
  json w = json::array();
  for (const auto& row : s.witness) {
    w.push_back(unbounded_list(row));
  }
  return json{{"rigid_distance", unbounded_list(s.rigid_distance)},
              {"loose_radius", unbounded_list(s.loose_radius)},
              {"witness", std::move(w)}};
}

json to_json(const RecolorTrace& t) {
  json dead = json::array();
  for (const auto& d : t.dead) {
    dead.push_back(json{{"vertex", d.vertex}, {"had_free_colors", d.had_free_colors}, {"colors", d.colors},
                        {"woke", d.woke}});
  }
  return json{{"v0", t.v0},
              {"target", t.target},
              {"q", t.q},
              {"dead", std::move(dead)},
              {"success", t.success()},
              {"tau", t.tau ? json(t.tau->values) : json(nullptr)},
              {"failure", t.failure},
              {"list_coloring_nodes", t.list_coloring_nodes}};
}

json to_json(const CoreResult& c) {
  json removals = json::array();
  for (const auto& r : c.removals) {
    removals.push_back(json{{"variable", r.variable}, {"phase", std::string(to_string(r.phase))}});
  }
  return json{{"core", c.core},
              {"removals", std::move(removals)},
              {"gamma", c.gamma},
              {"beta", c.beta},
              {"verified", c.verified},
              {"failing", c.failing},
              {"occurrence_reading_verified", optional_json(c.occurrence_reading_verified)}};
}

json to_json(const SparsityResult& r) {
  return json{{"violated", r.violated},
              {"exhaustive", r.exhaustive},
              {"witness", r.witness},
              {"witness_constraints", r.witness_constraints},
              {"witness_density", r.witness_density}};
}

json to_json(const HeuristicOutcome& h) {
  json j{{"success", h.success},
         {"steps", h.steps},
         {"forced_steps", h.forced_steps},
         {"assignment", h.assignment ? json(h.assignment->values) : json(nullptr)}};
  if (h.failure) {
    j["failure"] = json{{"step", h.failure->step}, {"where", h.failure->where}};
  } else {
    j["failure"] = nullptr;
  }
  return j;
}

json to_json(const SweepRow& r) {
  return json{{"ensemble", std::string(to_string(r.ensemble))},
              {"n", r.n},
              {"k", r.k},
              {"density", r.density},
              {"m", r.m},
              {"trials", r.trials},
              {"successes", r.successes},
              {"ci_low", r.ci_low},
              {"ci_high", r.ci_high}};
}

json to_json(const OptimizerResult& r) {
  json rows = json::array();
  for (unsigned i = 0; i < r.k; ++i) {
    rows.push_back(std::vector<double>(r.matrix.begin() + i * r.k, r.matrix.begin() + (i + 1) * r.k));
  }
  return json{{"k", r.k},
              {"r", r.r},
              {"x", r.x},
              {"psi", r.psi},
              {"matrix", std::move(rows)},
              {"value", r.value},
              {"ansatz_h", r.ansatz_h},
              {"ansatz_value", r.ansatz_value},
              {"starts", r.starts},
              {"best_start", r.best_start}};
}

json to_json(const UpperBoundReport& r) {
  return json{{"literal_rhs", r.literal_rhs},
              {"ln_variant_rhs", r.ln_variant_rhs},
              {"grid_max", r.grid_max},
              {"grid_argmax", r.grid_argmax},
              {"grid_low", r.grid_low},
              {"grid_high", r.grid_high},
              {"grid_points", r.grid_points},
              {"literal_holds", r.literal_holds},
              {"ln_variant_holds", r.ln_variant_holds}};
}

json to_json(const IncidenceReport& r) {
  return json{{"exact", r.exact},
              {"signed_nae", r.signed_nae},
              {"assignments", r.assignments},
              {"instances", r.instances},
              {"row_weights", r.row_weights},
              {"row_weights_closed_form", r.row_weights_closed_form},
              {"rows_match_closed_form", r.rows_match_closed_form},
              {"rows_equal", r.rows_equal},
              {"row_total", r.row_total},
              {"column_total", r.column_total},
              {"column_mean", r.column_mean},
              {"column_variance", r.column_variance},
              {"thresholds", r.thresholds},
              {"fraction_at_least", r.fraction_at_least}};
}

json to_json(const StatisticSummary& s) {
  return json{{"name", s.name},
              {"uniform_samples", s.uniform_values.size()},
              {"planted_samples", s.planted_values.size()},
              {"uniform_attempts", s.uniform_attempts},
              {"uniform_empty", s.uniform_empty},
              {"binning_rule", s.binning_rule},
              {"bin_edges", s.bin_edges},
              {"uniform_counts", s.uniform_counts},
              {"planted_counts", s.planted_counts},
              {"tv", s.tv},
              {"p_value", s.p_value},
              {"permutations", s.permutations},
              {"degenerate", s.degenerate}};
}

json to_json(const ConcentrationReport& r) {
  json j{{"ensemble", std::string(to_string(r.params.ensemble))},
         {"n", r.params.n},
         {"m", r.params.m},
         {"k", r.params.k},
         {"trials", r.trials.size()},
         {"nonempty", r.nonempty},
         {"conditioning_rate", r.conditioning_rate},
         {"mean", finite_or_null(r.mean)},
         {"median", finite_or_null(r.median)},
         {"q1", finite_or_null(r.q1)},
         {"q3", finite_or_null(r.q3)},
         {"iqr", finite_or_null(r.iqr)},
         {"log_expectation_per_n", finite_or_null(r.log_expectation_per_n)}};
  j["sat_bound_violation_rate"] = optional_json(r.sat_bound_violation_rate);
  return j;
}

}  // namespace cspgeo
