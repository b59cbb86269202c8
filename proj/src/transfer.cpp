#include "cspgeo/transfer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>

#include "cspgeo/combinatorics.hpp"
#include "cspgeo/detail/parallel.hpp"
#include "cspgeo/errors.hpp"
#include "cspgeo/geometry.hpp"
#include "cspgeo/moments.hpp"

namespace cspgeo {

Instance generate_uniform(const EnsembleParams& p, Seed seed) {
  switch (p.ensemble) {
    case Ensemble::coloring:
      return gen_uniform_graph(p.n, p.m, p.k, seed, p.sampling);
    case Ensemble::sat:
      return gen_uniform_cnf(p.n, p.m, p.k, seed, p.sampling);
    case Ensemble::nae:
      return gen_uniform_hypergraph(p.n, p.m, p.k, seed, p.sampling);
  }
  throw ParameterError("unknown ensemble");
}

PlantedPair generate_planted(const EnsembleParams& p, Seed seed) {
  switch (p.ensemble) {
    case Ensemble::coloring: {
      auto r = gen_planted_coloring(p.n, p.m, p.k, seed, p.planting);
      return {std::move(r.instance), std::move(r.planted)};
    }
    case Ensemble::sat: {
      auto r = gen_planted_cnf(p.n, p.m, p.k, seed, p.planting);
      return {std::move(r.instance), std::move(r.planted)};
    }
    case Ensemble::nae: {
      auto r = gen_planted_nae(p.n, p.m, p.k, seed, p.planting);
      return {std::move(r.instance), std::move(r.planted)};
    }
  }
  throw ParameterError("unknown ensemble");
}

std::string_view to_string(Provenance p) { return p == Provenance::uniform ? "uniform" : "planted"; }

namespace {

unsigned value_count(const EnsembleParams& p) { return p.ensemble == Ensemble::coloring ? p.k : 2; }

}  // namespace

PairSample sample_uniform_pair(const EnsembleParams& p, Seed seed, std::uint64_t budget) {
  state_space_size(p.n, value_count(p), budget);
  PairSample s{generate_uniform(p, derive_seed(seed, 0)), std::nullopt, Provenance::uniform, seed};
  const auto solutions = enumerate_solutions(s.instance, budget);
  if (!solutions.empty()) {
    Rng rng(derive_seed(seed, 1));
    s.solution = solutions.assignment(rng.below(solutions.size()));
  }
  return s;
}

PairSample sample_planted_pair(const EnsembleParams& p, Seed seed) {
  auto planted = generate_planted(p, seed);
  return PairSample{std::move(planted.instance), std::move(planted.planted), Provenance::planted, seed};
}

// ---------------------------------------------------------------------------------

namespace {

/// Compatible-constraint mask of one assignment over a universe of at most 64 constraints.
std::uint64_t compatible_mask(const EnsembleParams& p, bool signed_nae, const std::vector<std::uint8_t>& a,
                              std::uint64_t universe) {
  std::uint64_t mask = 0;
  for (std::uint64_t i = 0; i < universe; ++i) {
    bool ok = false;
    if (p.ensemble == Ensemble::coloring) {
      const auto e = decode_pair(i, p.n);
      ok = a[e.u] != a[e.v];
    } else if (p.ensemble == Ensemble::sat || signed_nae) {
      const auto c = decode_clause(i, p.n, p.k);
      bool any_true = false;
      bool any_false = false;
      for (const auto& l : c) {
        const bool t = (a[l.var] != 0) != l.negated;
        any_true = any_true || t;
        any_false = any_false || !t;
      }
      ok = p.ensemble == Ensemble::sat ? any_true : (any_true && any_false);
    } else {
      const auto e = decode_subset(i, p.n, p.k);
      bool any0 = false;
      bool any1 = false;
      for (auto v : e) {
        any0 = any0 || a[v] == 0;
        any1 = any1 || a[v] != 0;
      }
      ok = any0 && any1;
    }
    if (ok) {
      mask |= std::uint64_t{1} << i;
    }
  }
  return mask;
}

/// Closed-form number of constraints compatible with sigma.
std::uint64_t compatible_count(const EnsembleParams& p, bool signed_nae, const Assignment& sigma) {
  switch (p.ensemble) {
    case Ensemble::coloring:
      return bichromatic_pair_count(sigma);
    case Ensemble::sat:
      return ((std::uint64_t{1} << p.k) - 1) * binomial_checked(p.n, p.k);
    case Ensemble::nae:
      return signed_nae ? ((std::uint64_t{1} << p.k) - 2) * binomial_checked(p.n, p.k)
                        : nae_compatible_count(sigma, p.k);
  }
  return 0;
}

void decode_assignment(std::uint64_t code, unsigned n, unsigned base, std::vector<std::uint8_t>& out) {
  for (unsigned v = n; v-- > 0;) {
    out[v] = static_cast<std::uint8_t>(code % base);
    code /= base;
  }
}

void finish_columns(IncidenceReport& r) {
  const double count = static_cast<double>(r.column_weights.size());
  if (count == 0) {
    return;
  }
  long double sum = 0;
  for (auto w : r.column_weights) {
    sum += w;
  }
  r.column_mean = static_cast<double>(sum / count);
  long double var = 0;
  for (auto w : r.column_weights) {
    const long double d = static_cast<long double>(w) - r.column_mean;
    var += d * d;
  }
  r.column_variance = static_cast<double>(var / count);
  r.fraction_at_least.clear();
  for (double c : r.thresholds) {
    const auto hits = std::count_if(r.column_weights.begin(), r.column_weights.end(),
                                    [&](std::uint64_t w) { return static_cast<double>(w) >= c * r.column_mean; });
    r.fraction_at_least.push_back(static_cast<double>(hits) / count);
  }
}

}  // namespace

IncidenceReport incidence_balance(const EnsembleParams& p, IncidenceOptions opts) {
  const bool signed_nae = opts.signed_nae && p.ensemble == Ensemble::nae;
  const unsigned base = value_count(p);
  const std::uint64_t universe =
      signed_nae ? universe_size(Ensemble::sat, p.n, p.k) : universe_size(p.ensemble, p.n, p.k);
  if (p.m > universe) {
    throw ParameterError("incidence_balance: m exceeds the constraint universe");
  }
  IncidenceReport r;
  r.signed_nae = signed_nae;

  const auto rows = checked_pow(base, p.n);
  const auto columns = binomial_exact(universe, p.m);
  const bool exact_ok = universe < 64 && rows && columns && *rows <= opts.budget &&
                        (*columns == 0 || *rows <= opts.budget / *columns);
  if (exact_ok) {
    r.exact = true;
    r.assignments = *rows;
    r.instances = *columns;
    std::vector<std::uint64_t> masks(r.assignments);
    std::vector<std::uint8_t> a(p.n);
    for (std::uint64_t code = 0; code < r.assignments; ++code) {
      decode_assignment(code, p.n, base, a);
      masks[code] = compatible_mask(p, signed_nae, a, universe);
      const Assignment sigma(a, base);
      r.row_weights_closed_form.push_back(binomial_checked(compatible_count(p, signed_nae, sigma), p.m));
    }
    r.row_weights.assign(r.assignments, 0);
    r.column_weights.reserve(r.instances);
    auto visit = [&](std::uint64_t subset) {
      std::uint64_t w = 0;
      for (std::uint64_t code = 0; code < r.assignments; ++code) {
        if ((subset & ~masks[code]) == 0) {
          ++w;
          ++r.row_weights[code];
        }
      }
      r.column_weights.push_back(w);
      r.column_total += w;
    };
    if (p.m == 0) {
      visit(0);
    } else {
      // Gosper's hack over all m-subsets of the universe.
      std::uint64_t s = (std::uint64_t{1} << p.m) - 1;
      const std::uint64_t limit = std::uint64_t{1} << universe;
      while (s < limit) {
        visit(s);
        const std::uint64_t c = s & (0 - s);
        const std::uint64_t nx = s + c;
        s = (((nx ^ s) >> 2) / c) | nx;
      }
    }
    for (std::uint64_t code = 0; code < r.assignments; ++code) {
      r.row_total += r.row_weights[code];
      r.rows_match_closed_form = r.rows_match_closed_form && r.row_weights[code] == r.row_weights_closed_form[code];
      r.rows_equal = r.rows_equal && r.row_weights[code] == r.row_weights[0];
    }
    finish_columns(r);
    return r;
  }

  if (opts.samples == 0) {
    throw ResourceError("incidence_balance: exact mode exceeds the budget and no samples were requested");
  }
  if (signed_nae) {
    throw ParameterError("incidence_balance: sampled mode does not support signed NAE constraints");
  }
  r.exact = false;
  r.rows_match_closed_form = false;
  Rng rng(opts.seed);
  for (std::uint64_t t = 0; t < opts.samples; ++t) {
    const auto sigma = sample_assignment(p.n, base, PlantBalance::uniform, rng);
    r.row_weights_closed_form.push_back(binomial_exact(compatible_count(p, false, sigma), p.m).value_or(0));
    const auto inst = generate_uniform(p, derive_seed(opts.seed, t));
    r.column_weights.push_back(enumerate_solutions(inst, opts.budget).size());
  }
  r.assignments = opts.samples;
  r.instances = opts.samples;
  for (auto w : r.row_weights_closed_form) {
    r.rows_equal = r.rows_equal && w == r.row_weights_closed_form[0];
  }
  finish_columns(r);
  return r;
}

// ---------------------------------------------------------------------------------

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) {
    throw UndefinedResultError("quantile of an empty sample");
  }
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

double binned_tv(const std::vector<std::size_t>& bin_of, std::size_t bins, const std::vector<std::uint8_t>& label,
                 std::size_t n_uniform, std::size_t n_planted, std::vector<std::uint64_t>* uc = nullptr,
                 std::vector<std::uint64_t>* pc = nullptr) {
  std::vector<std::uint64_t> cu(bins, 0);
  std::vector<std::uint64_t> cp(bins, 0);
  for (std::size_t i = 0; i < bin_of.size(); ++i) {
    ++(label[i] == 0 ? cu : cp)[bin_of[i]];
  }
  double tv = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    tv += std::fabs(static_cast<double>(cu[b]) / static_cast<double>(n_uniform) -
                    static_cast<double>(cp[b]) / static_cast<double>(n_planted));
  }
  if (uc != nullptr) {
    *uc = std::move(cu);
    *pc = std::move(cp);
  }
  return std::min(1.0, tv / 2);
}

}  // namespace

StatisticSummary summarize_statistic(std::string name, std::vector<double> uniform_values,
                                     std::vector<double> planted_values, unsigned permutations, Seed seed) {
  if (uniform_values.empty() || planted_values.empty()) {
    throw UndefinedResultError("summarize_statistic: both samples must be non-empty");
  }
  StatisticSummary s;
  s.name = std::move(name);
  s.permutations = permutations;
  std::vector<double> pooled(uniform_values);
  pooled.insert(pooled.end(), planted_values.begin(), planted_values.end());
  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const auto total = static_cast<double>(sorted.size());

  std::size_t bins = 1;
  if (lo == hi) {
    s.degenerate = true;
    s.binning_rule = "single bin (constant statistic)";
  } else {
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    if (iqr > 0) {
      const double width = 2 * iqr / std::cbrt(total);
      bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
      s.binning_rule = "freedman-diaconis";
    } else {
      bins = static_cast<std::size_t>(std::ceil(std::log2(total))) + 1;
      s.binning_rule = "sturges (pooled IQR is 0)";
    }
    bins = std::clamp<std::size_t>(bins, 1, 10000);
  }
  for (std::size_t b = 0; b <= bins; ++b) {
    s.bin_edges.push_back(lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins));
  }
  s.bin_edges.back() = hi;

  std::vector<std::size_t> bin_of(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    if (bins == 1) {
      bin_of[i] = 0;
    } else {
      const auto b = static_cast<std::size_t>((pooled[i] - lo) / (hi - lo) * static_cast<double>(bins));
      bin_of[i] = std::min(b, bins - 1);
    }
  }
  std::vector<std::uint8_t> label(pooled.size(), 0);
  std::fill(label.begin() + static_cast<std::ptrdiff_t>(uniform_values.size()), label.end(), std::uint8_t{1});
  const auto nu = uniform_values.size();
  const auto np = planted_values.size();
  s.tv = binned_tv(bin_of, bins, label, nu, np, &s.uniform_counts, &s.planted_counts);

  if (s.degenerate) {
    s.p_value = 1.0;
  } else {
    Rng rng(seed);
    std::uint64_t extreme = 0;
    for (unsigned i = 0; i < permutations; ++i) {
      rng.shuffle(std::span<std::uint8_t>(label));
      if (binned_tv(bin_of, bins, label, nu, np) >= s.tv - 1e-12) {
        ++extreme;
      }
    }
    s.p_value = static_cast<double>(1 + extreme) / static_cast<double>(1 + permutations);
  }
  s.uniform_values = std::move(uniform_values);
  s.planted_values = std::move(planted_values);
  return s;
}

StatisticSummary compare_statistic(const std::string& name, const StatisticFn& statistic, const EnsembleParams& p,
                                   std::uint64_t samples, Seed seed, CompareOptions opts) {
  if (samples < 100) {
    throw ParameterError("compare_statistic: at least 100 samples are required");
  }
  std::vector<double> uniform_values;
  std::vector<double> planted_values;
  std::uint64_t empty = 0;
  const Seed uniform_seed = derive_seed(seed, 0);
  const Seed planted_seed = derive_seed(seed, 1);
  for (std::uint64_t t = 0; t < samples; ++t) {
    const auto u = sample_uniform_pair(p, derive_seed(uniform_seed, t), opts.budget);
    if (u.empty()) {
      ++empty;
    } else {
      uniform_values.push_back(statistic(u));
    }
    planted_values.push_back(statistic(sample_planted_pair(p, derive_seed(planted_seed, t))));
  }
  auto s = summarize_statistic(name, std::move(uniform_values), std::move(planted_values), opts.permutations,
                               derive_seed(seed, 2));
  s.uniform_attempts = samples;
  s.uniform_empty = empty;
  return s;
}

StatisticFn loose_variable_statistic(std::uint32_t radius, std::uint64_t budget) {
  return [radius, budget](const PairSample& s) {
    const auto solutions = enumerate_solutions(s.instance, budget);
    const auto st = classify_variables(solutions, *s.solution);
    return static_cast<double>(
        std::count_if(st.loose_radius.begin(), st.loose_radius.end(), [&](std::uint32_t r) { return r <= radius; }));
  };
}

// ---------------------------------------------------------------------------------

ConcentrationReport concentration_check(const EnsembleParams& p, std::uint64_t trials, Seed seed,
                                        std::uint64_t budget, unsigned threads) {
  if (trials == 0) {
    throw ParameterError("concentration_check: trials must be at least 1");
  }
  if (p.n == 0) {
    throw ParameterError("concentration_check: n must be positive");
  }
  state_space_size(p.n, value_count(p), budget);
  ConcentrationReport r;
  r.params = p;
  r.trials.resize(trials);
  const double n = p.n;
  const bool sat = p.ensemble == Ensemble::sat;
  const bool independent = p.sampling.mode == SamplingMode::independent;
  double log_bound = 0;
  if (sat) {
    const double mu = static_cast<double>(expected_solutions_sat(p.n, p.m, p.k, false));
    log_bound = mu - p.k * std::ldexp(1.0, 3 - static_cast<int>(p.k)) * n;
  }
  detail::parallel_for(trials, threads, [&](std::uint64_t t) {
    auto& tr = r.trials[t];
    tr.trial = t;
    tr.seed = derive_seed(seed, t);
    const auto inst = generate_uniform(p, tr.seed);
    tr.solutions = enumerate_solutions(inst, budget).size();
    tr.log_per_n = tr.solutions == 0 ? -std::numeric_limits<double>::infinity()
                                     : std::log(static_cast<double>(tr.solutions)) / n;
    tr.below_sat_bound = sat && (tr.solutions == 0 || std::log(static_cast<double>(tr.solutions)) < log_bound);
  });

  std::vector<double> logs;
  std::uint64_t violations = 0;
  for (const auto& tr : r.trials) {
    if (tr.solutions > 0) {
      logs.push_back(tr.log_per_n);
    }
    violations += tr.below_sat_bound ? 1 : 0;
  }
  r.nonempty = logs.size();
  r.conditioning_rate = static_cast<double>(r.nonempty) / static_cast<double>(trials);
  if (!logs.empty()) {
    std::sort(logs.begin(), logs.end());
    long double sum = 0;
    for (double v : logs) {
      sum += v;
    }
    r.mean = static_cast<double>(sum / logs.size());
    r.median = quantile_sorted(logs, 0.5);
    r.q1 = quantile_sorted(logs, 0.25);
    r.q3 = quantile_sorted(logs, 0.75);
    r.iqr = r.q3 - r.q1;
  }
  long double log_e = 0;
  switch (p.ensemble) {
    case Ensemble::coloring:
      log_e = expected_solutions_coloring(p.n, p.m, p.k).log_value;
      break;
    case Ensemble::sat:
      log_e = expected_solutions_sat(p.n, p.m, p.k, !independent);
      break;
    case Ensemble::nae:
      log_e = expected_solutions_nae(p.n, p.m, p.k);
      break;
  }
  r.log_expectation_per_n = static_cast<double>(log_e / n);
  if (sat) {
    r.sat_bound_violation_rate = static_cast<double>(violations) / static_cast<double>(trials);
  }
  return r;
}

void write_concentration_csv(std::ostream& out, const ConcentrationReport& r) {
  const auto old = out.precision(17);
  out << "trial,seed,solutions,log_per_n,below_sat_bound\n";
  for (const auto& t : r.trials) {
    out << t.trial << ',' << t.seed.value << ',' << t.solutions << ',';
    if (t.solutions == 0) {
      out << "-inf";
    } else {
      out << t.log_per_n;
    }
    out << ',' << (t.below_sat_bound ? 1 : 0) << '\n';
  }
  out.precision(old);
}

}  // namespace cspgeo
