#include "cspgeo/algorithms.hpp"

#include <bit>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

#include "cspgeo/detail/parallel.hpp"
#include "cspgeo/errors.hpp"
#include "cspgeo/landscape.hpp"

namespace cspgeo {

namespace {

/// Vector with O(1) insert, erase and uniform pick.
class IndexBag {
 public:
  explicit IndexBag(std::size_t universe) : pos_(universe, kAbsent) {}

  void insert(std::uint32_t x) {
    pos_[x] = items_.size();
    items_.push_back(x);
  }
  void erase(std::uint32_t x) {
    const auto p = pos_[x];
    const auto last = items_.back();
    items_[p] = last;
    pos_[last] = p;
    items_.pop_back();
    pos_[x] = kAbsent;
  }
  [[nodiscard]] bool empty() const noexcept { return items_.empty(); }
  [[nodiscard]] std::uint32_t pick(Rng& rng) const { return items_[rng.below(items_.size())]; }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pos_;
  std::vector<std::uint32_t> items_;
};

void check_success(const Instance& inst, const HeuristicOutcome& out) {
  if (out.success && violated_count(inst, *out.assignment) != 0) {
    throw std::logic_error("heuristic reported success on a violating assignment");
  }
}

}  // namespace

HeuristicOutcome unit_clause_solve(const CnfInstance& f, Seed seed) {
  validate(f);
  Rng rng(seed);
  const unsigned n = f.n;
  const auto m = static_cast<std::uint32_t>(f.clauses.size());
  HeuristicOutcome out;

  std::vector<std::vector<std::uint32_t>> occ(n);
  std::vector<unsigned> open(m);
  std::vector<bool> satisfied(m, false);
  std::set<std::uint32_t> units;
  for (std::uint32_t c = 0; c < m; ++c) {
    open[c] = static_cast<unsigned>(f.clauses[c].size());
    for (const auto& l : f.clauses[c]) {
      occ[l.var].push_back(c);
    }
    if (open[c] == 0) {
      out.failure = FailurePoint{0, c};
      return out;
    }
    if (open[c] == 1) {
      units.insert(c);
    }
  }

  std::vector<int> value(n, -1);
  IndexBag free_vars(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    free_vars.insert(v);
  }

  auto assign = [&](std::uint32_t x, int b) -> bool {
    value[x] = b;
    free_vars.erase(x);
    ++out.steps;
    bool ok = true;
    for (auto c : occ[x]) {
      if (satisfied[c]) {
        continue;
      }
      bool lit_true = false;
      for (const auto& l : f.clauses[c]) {
        if (l.var == x) {
          lit_true = (b != 0) != l.negated;
          break;
        }
      }
      if (lit_true) {
        satisfied[c] = true;
        units.erase(c);
      } else if (--open[c] == 0) {
        units.erase(c);
        if (ok) {
          out.failure = FailurePoint{out.steps, c};
        }
        ok = false;
      } else if (open[c] == 1) {
        units.insert(c);
      }
    }
    return ok;
  };

  while (!free_vars.empty()) {
    if (out.steps > static_cast<std::uint64_t>(n) + m) {
      throw std::logic_error("unit_clause_solve exceeded its step ceiling");
    }
    if (!units.empty()) {
      const auto c = *units.begin();
      for (const auto& l : f.clauses[c]) {
        if (value[l.var] < 0) {
          ++out.forced_steps;
          if (!assign(l.var, l.negated ? 0 : 1)) {
            return out;
          }
          break;
        }
      }
    } else {
      const auto x = free_vars.pick(rng);
      if (!assign(x, rng.coin() ? 1 : 0)) {
        return out;
      }
    }
  }
  std::vector<std::uint8_t> values(n);
  for (unsigned v = 0; v < n; ++v) {
    values[v] = static_cast<std::uint8_t>(value[v]);
  }
  out.success = true;
  out.assignment = Assignment(std::move(values), 2);
  check_success(f, out);
  return out;
}

HeuristicOutcome greedy_color(const GraphInstance& g, Seed seed) {
  validate(g);
  if (g.k > 64) {
    throw ParameterError("greedy_color: at most 64 colors are supported");
  }
  Rng rng(seed);
  const unsigned n = g.n;
  const unsigned k = g.k;
  HeuristicOutcome out;

  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const auto& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  const std::uint64_t full = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  std::vector<std::uint64_t> avail(n, full);
  std::vector<bool> colored(n, false);
  std::vector<std::uint8_t> color(n, 0);
  std::vector<IndexBag> buckets(k + 1, IndexBag(n));
  for (std::uint32_t v = 0; v < n; ++v) {
    buckets[k].insert(v);
  }

  for (unsigned step = 0; step < n; ++step) {
    unsigned b = 0;
    while (buckets[b].empty()) {
      ++b;
    }
    if (b == 0) {
      // Any vertex in bucket 0 is stuck; report the one a uniform pick would give.
      out.failure = FailurePoint{out.steps, buckets[0].pick(rng)};
      return out;
    }
    const auto v = buckets[b].pick(rng);
    buckets[b].erase(v);
    // The j-th available color, j uniform.
    auto mask = avail[v];
    for (auto j = rng.below(b); j > 0; --j) {
      mask &= mask - 1;
    }
    const auto c = static_cast<unsigned>(std::countr_zero(mask));
    color[v] = static_cast<std::uint8_t>(c);
    colored[v] = true;
    ++out.steps;
    out.forced_steps += b == 1 ? 1 : 0;
    const std::uint64_t bit = std::uint64_t{1} << c;
    for (auto u : adj[v]) {
      if (!colored[u] && (avail[u] & bit) != 0) {
        const auto before = static_cast<unsigned>(std::popcount(avail[u]));
        buckets[before].erase(u);
        avail[u] &= ~bit;
        buckets[before - 1].insert(u);
      }
    }
  }
  out.success = true;
  out.assignment = Assignment(std::move(color), k);
  check_success(g, out);
  return out;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) {
    return {0.0, 1.0};
  }
  constexpr double z = 1.959963984540054;
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double denom = 1 + z * z / nt;
  const double centre = (p + z * z / (2 * nt)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nt + z * z / (4 * nt * nt)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::uint64_t constraints_for_density(Ensemble e, unsigned n, double density) {
  if (!(density >= 0) || !std::isfinite(density)) {
    throw ParameterError("density must be finite and non-negative");
  }
  const double m = e == Ensemble::coloring ? density * n / 2 : density * n;
  return static_cast<std::uint64_t>(std::llround(m));
}

std::vector<SweepRow> density_sweep(const SweepParams& params, const std::vector<double>& grid,
                                    std::uint64_t trials, Seed seed, unsigned threads) {
  if (grid.empty()) {
    throw ParameterError("density_sweep: empty density grid");
  }
  if (trials == 0) {
    throw ParameterError("density_sweep: trials must be at least 1");
  }
  if (params.ensemble == Ensemble::nae) {
    throw ParameterError("density_sweep: no reference heuristic for the nae ensemble");
  }
  std::vector<SweepRow> rows(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto& r = rows[g];
    r.ensemble = params.ensemble;
    r.n = params.n;
    r.k = params.k;
    r.density = grid[g];
    r.m = constraints_for_density(params.ensemble, params.n, grid[g]);
    r.trials = trials;
    const auto cap = universe_size(params.ensemble, params.n, params.k);
    if (r.m > cap) {
      throw ParameterError("density_sweep: density exceeds the number of admissible constraints");
    }
  }

  const std::uint64_t total = grid.size() * trials;
  std::vector<std::uint8_t> ok(total, 0);
  detail::parallel_for(total, threads, [&](std::uint64_t task) {
    const auto g = task / trials;
    const auto t = task % trials;
    const Seed trial = derive_seed(derive_seed(seed, g), t);
    const auto m = rows[g].m;
    bool success = false;
    if (params.ensemble == Ensemble::coloring) {
      const auto inst = gen_uniform_graph(params.n, m, params.k, derive_seed(trial, 0));
      success = greedy_color(inst, derive_seed(trial, 1)).success;
    } else {
      const auto inst = gen_uniform_cnf(params.n, m, params.k, derive_seed(trial, 0));
      success = unit_clause_solve(inst, derive_seed(trial, 1)).success;
    }
    ok[task] = success ? 1 : 0;
  });
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::uint64_t s = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      s += ok[g * trials + t];
    }
    rows[g].successes = s;
    const auto ci = wilson_interval(s, trials);
    rows[g].ci_low = ci.low;
    rows[g].ci_high = ci.high;
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "ensemble,n,k,density,trials,successes,ci_low,ci_high\n";
  for (const auto& r : rows) {
    out << to_string(r.ensemble) << ',' << r.n << ',' << r.k << ',' << r.density << ',' << r.trials << ','
        << r.successes << ',' << r.ci_low << ',' << r.ci_high << '\n';
  }
}

}  // namespace cspgeo
