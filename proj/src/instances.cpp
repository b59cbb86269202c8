#include "cspgeo/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "cspgeo/combinatorics.hpp"
#include "cspgeo/errors.hpp"

namespace cspgeo {

std::string_view to_string(Ensemble e) {
  switch (e) {
    case Ensemble::coloring:
      return "coloring";
    case Ensemble::sat:
      return "sat";
    case Ensemble::nae:
      return "nae";
  }
  return "?";
}

Ensemble parse_ensemble(std::string_view name) {
  if (name == "coloring") return Ensemble::coloring;
  if (name == "sat") return Ensemble::sat;
  if (name == "nae") return Ensemble::nae;
  throw ParameterError("unknown ensemble '" + std::string(name) + "'");
}

Assignment::Assignment(std::vector<std::uint8_t> v, unsigned k) : values(std::move(v)), domain_size(k) {
  if (k < 2 || k > 255) {
    throw ParameterError("domain size must lie in [2, 255]");
  }
  for (auto x : values) {
    if (x >= k) {
      throw ParameterError("assignment value " + std::to_string(x) + " outside domain of size " +
                           std::to_string(k));
    }
  }
}

std::size_t hamming_distance(const Assignment& a, const Assignment& b) {
  if (a.size() != b.size()) {
    throw ParameterError("hamming_distance: length mismatch");
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] != b[i] ? 1 : 0;
  }
  return d;
}

Ensemble ensemble_of(const Instance& inst) {
  return static_cast<Ensemble>(inst.index());
}

unsigned variable_count(const Instance& inst) {
  return std::visit([](const auto& i) { return i.n; }, inst);
}

unsigned domain_size(const Instance& inst) {
  if (const auto* g = std::get_if<GraphInstance>(&inst)) {
    return g->k;
  }
  return 2;
}

std::size_t constraint_count(const Instance& inst) {
  return std::visit(
      [](const auto& i) -> std::size_t {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, GraphInstance>) {
          return i.edges.size();
        } else if constexpr (std::is_same_v<T, CnfInstance>) {
          return i.clauses.size();
        } else {
          return i.edges.size();
        }
      },
      inst);
}

unsigned width_parameter(const Instance& inst) {
  return std::visit([](const auto& i) { return i.k; }, inst);
}

void validate(const GraphInstance& g) {
  if (g.k < 1) {
    throw ParameterError("graph: k must be positive");
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (e.u >= e.v) {
      throw ParameterError("graph: edge endpoints must satisfy u < v (no self-loops)");
    }
    if (e.v >= g.n) {
      throw ParameterError("graph: edge endpoint out of range");
    }
    if (i > 0 && !(g.edges[i - 1] < e)) {
      throw ParameterError("graph: edges must be sorted and distinct");
    }
  }
}

void validate(const CnfInstance& f) {
  for (std::size_t i = 0; i < f.clauses.size(); ++i) {
    const auto& c = f.clauses[i];
    if (c.size() != f.k) {
      throw ParameterError("cnf: clause width differs from k");
    }
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j].var >= f.n) {
        throw ParameterError("cnf: variable out of range");
      }
      if (j > 0 && c[j - 1].var >= c[j].var) {
        throw ParameterError("cnf: clause variables must be ascending and distinct");
      }
    }
    if (i > 0 && !(f.clauses[i - 1] < c)) {
      throw ParameterError("cnf: clauses must be sorted and distinct");
    }
  }
}

void validate(const HypergraphInstance& h) {
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    const auto& e = h.edges[i];
    if (e.size() != h.k) {
      throw ParameterError("hypergraph: edge size differs from k");
    }
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] >= h.n) {
        throw ParameterError("hypergraph: vertex out of range");
      }
      if (j > 0 && e[j - 1] >= e[j]) {
        throw ParameterError("hypergraph: edge vertices must be ascending and distinct");
      }
    }
    if (i > 0 && !(h.edges[i - 1] < e)) {
      throw ParameterError("hypergraph: edges must be sorted and distinct");
    }
  }
}

void validate(const Instance& inst) {
  std::visit([](const auto& i) { validate(i); }, inst);
}

void validate_assignment(const Instance& inst, const Assignment& a) {
  if (a.size() != variable_count(inst)) {
    throw ParameterError("assignment length " + std::to_string(a.size()) + " differs from variable count " +
                         std::to_string(variable_count(inst)));
  }
  const unsigned k = domain_size(inst);
  if (a.domain_size != k) {
    throw ParameterError("assignment domain size differs from instance domain");
  }
  for (auto x : a.values) {
    if (x >= k) {
      throw ParameterError("assignment value outside domain");
    }
  }
}

// ---------------------------------------------------------------------------

std::uint64_t universe_size(Ensemble e, unsigned n, unsigned k) {
  switch (e) {
    case Ensemble::coloring:
      return binomial_checked(n, 2);
    case Ensemble::sat: {
      const auto c = binomial_checked(n, k);
      if (k >= 63 || (c != 0 && c > (std::numeric_limits<std::uint64_t>::max() >> k))) {
        throw ParameterError("clause universe exceeds 64 bits");
      }
      return c << k;
    }
    case Ensemble::nae:
      return binomial_checked(n, k);
  }
  return 0;
}

namespace {

constexpr std::uint64_t kEnumerateLimit = std::uint64_t{1} << 24;

/// Sorted list of sampled universe indices.
template <class Admit>
std::vector<std::uint64_t> sample_indices(std::uint64_t universe, std::uint64_t admissible, std::uint64_t m,
                                          Rng& rng, const SamplingOptions& opts, Admit&& admit) {
  std::vector<std::uint64_t> picked;
  if (opts.mode == SamplingMode::independent) {
    double p = opts.probability;
    if (p < 0) {
      p = admissible == 0 ? 0.0 : static_cast<double>(m) / static_cast<double>(admissible);
    }
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ParameterError("inclusion probability must lie in [0, 1]");
    }
    if (p == 0.0) {
      return picked;
    }
    // Geometric skipping over the index space.
    const double log_q = std::log1p(-p);
    std::uint64_t cand = 0;
    while (cand < universe) {
      if (p < 1.0) {
        const double g = std::floor(std::log1p(-rng.uniform()) / log_q);
        if (g >= static_cast<double>(universe - cand)) {
          break;
        }
        cand += static_cast<std::uint64_t>(g);
      }
      if (admit(cand)) {
        picked.push_back(cand);
      }
      ++cand;
    }
    return picked;
  }

  if (m > admissible) {
    throw ParameterError("requested " + std::to_string(m) + " constraints but only " +
                         std::to_string(admissible) + " are admissible");
  }
  if (universe <= kEnumerateLimit && 2 * m > admissible) {
    std::vector<std::uint64_t> pool;
    pool.reserve(admissible);
    for (std::uint64_t i = 0; i < universe; ++i) {
      if (admit(i)) {
        pool.push_back(i);
      }
    }
    for (std::uint64_t i = 0; i < m; ++i) {
      const auto j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
  }
  // Sequential rejection: each accepted index is uniform among the unused admissible ones.
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  picked.reserve(m);
  while (picked.size() < m) {
    const auto idx = rng.below(universe);
    if (!admit(idx) || !seen.insert(idx).second) {
      continue;
    }
    picked.push_back(idx);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

Edge decode_pair(std::uint64_t idx, unsigned n) {
  std::uint32_t c[2];
  unrank_combination(idx, n, 2, c);
  return Edge{c[0], c[1]};
}

Clause decode_clause(std::uint64_t idx, unsigned n, unsigned k) {
  std::vector<std::uint32_t> vars(k);
  unrank_combination(idx >> k, n, k, vars);
  Clause c(k);
  for (unsigned j = 0; j < k; ++j) {
    c[j] = Literal{vars[j], ((idx >> j) & 1U) != 0};
  }
  return c;
}

std::vector<std::uint32_t> decode_subset(std::uint64_t idx, unsigned n, unsigned k) {
  std::vector<std::uint32_t> vars(k);
  unrank_combination(idx, n, k, vars);
  return vars;
}

namespace {

void check_width(unsigned n, unsigned k) {
  if (k < 1 || k > n) {
    throw ParameterError("constraint width k must satisfy 1 <= k <= n");
  }
}

GraphInstance build_graph(unsigned n, unsigned k, const std::vector<std::uint64_t>& idx) {
  GraphInstance g{n, k, {}};
  g.edges.reserve(idx.size());
  for (auto i : idx) {
    g.edges.push_back(decode_pair(i, n));
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

CnfInstance build_cnf(unsigned n, unsigned k, const std::vector<std::uint64_t>& idx) {
  CnfInstance f{n, k, {}};
  f.clauses.reserve(idx.size());
  for (auto i : idx) {
    f.clauses.push_back(decode_clause(i, n, k));
  }
  std::sort(f.clauses.begin(), f.clauses.end());
  return f;
}

HypergraphInstance build_hypergraph(unsigned n, unsigned k, const std::vector<std::uint64_t>& idx) {
  HypergraphInstance h{n, k, {}};
  h.edges.reserve(idx.size());
  for (auto i : idx) {
    h.edges.push_back(decode_subset(i, n, k));
  }
  std::sort(h.edges.begin(), h.edges.end());
  return h;
}

bool literal_true(const Literal& l, const Assignment& a) { return (a[l.var] != 0) != l.negated; }

std::vector<std::uint64_t> class_sizes(const Assignment& a) {
  std::vector<std::uint64_t> sizes(a.domain_size, 0);
  for (auto v : a.values) {
    ++sizes[v];
  }
  return sizes;
}

}  // namespace

Instance instance_from_universe(Ensemble e, unsigned n, unsigned k, const std::vector<std::uint64_t>& indices) {
  const auto cap = universe_size(e, n, k);
  for (auto i : indices) {
    if (i >= cap) {
      throw ParameterError("universe index out of range");
    }
  }
  switch (e) {
    case Ensemble::coloring:
      return build_graph(n, k, indices);
    case Ensemble::sat:
      return build_cnf(n, k, indices);
    case Ensemble::nae:
      return build_hypergraph(n, k, indices);
  }
  throw ParameterError("unknown ensemble");
}

GraphInstance gen_uniform_graph(unsigned n, std::uint64_t m, unsigned k, Seed seed, SamplingOptions opts) {
  if (k < 2) {
    throw ParameterError("coloring: k must be at least 2");
  }
  const auto universe = universe_size(Ensemble::coloring, n, k);
  if (opts.mode == SamplingMode::without_replacement && m > universe) {
    throw ParameterError("coloring: m exceeds n(n-1)/2");
  }
  Rng rng(seed);
  return build_graph(n, k, sample_indices(universe, universe, m, rng, opts, [](std::uint64_t) { return true; }));
}

CnfInstance gen_uniform_cnf(unsigned n, std::uint64_t m, unsigned k, Seed seed, SamplingOptions opts) {
  check_width(n, k);
  const auto universe = universe_size(Ensemble::sat, n, k);
  if (opts.mode == SamplingMode::without_replacement && m > universe) {
    throw ParameterError("sat: m exceeds 2^k C(n,k)");
  }
  Rng rng(seed);
  return build_cnf(n, k, sample_indices(universe, universe, m, rng, opts, [](std::uint64_t) { return true; }));
}

HypergraphInstance gen_uniform_hypergraph(unsigned n, std::uint64_t m, unsigned k, Seed seed,
                                          SamplingOptions opts) {
  check_width(n, k);
  const auto universe = universe_size(Ensemble::nae, n, k);
  if (opts.mode == SamplingMode::without_replacement && m > universe) {
    throw ParameterError("nae: m exceeds C(n,k)");
  }
  Rng rng(seed);
  return build_hypergraph(n, k,
                          sample_indices(universe, universe, m, rng, opts, [](std::uint64_t) { return true; }));
}

std::uint64_t bichromatic_pair_count(const Assignment& sigma) {
  const auto sizes = class_sizes(sigma);
  const std::uint64_t n = sigma.size();
  std::uint64_t same = 0;
  for (auto s : sizes) {
    same += s * s;
  }
  return (n * n - same) / 2;
}

std::uint64_t nae_compatible_count(const Assignment& sigma, unsigned k) {
  const auto sizes = class_sizes(sigma);
  std::uint64_t total = binomial_checked(sigma.size(), k);
  for (auto s : sizes) {
    total -= binomial_checked(s, k);
  }
  return total;
}

GraphInstance plant_graph(const Assignment& sigma, std::uint64_t m, Seed seed, SamplingOptions opts) {
  const unsigned n = static_cast<unsigned>(sigma.size());
  const unsigned k = sigma.domain_size;
  const auto universe = universe_size(Ensemble::coloring, n, k);
  Rng rng(seed);
  auto admit = [&](std::uint64_t idx) {
    const Edge e = decode_pair(idx, n);
    return sigma[e.u] != sigma[e.v];
  };
  return build_graph(n, k, sample_indices(universe, bichromatic_pair_count(sigma), m, rng, opts, admit));
}

CnfInstance plant_cnf(const Assignment& sigma, std::uint64_t m, unsigned k, Seed seed, SamplingOptions opts) {
  const unsigned n = static_cast<unsigned>(sigma.size());
  check_width(n, k);
  if (sigma.domain_size != 2) {
    throw ParameterError("plant_cnf: assignment must be Boolean");
  }
  const auto universe = universe_size(Ensemble::sat, n, k);
  const auto admissible = universe - (universe >> k);
  Rng rng(seed);
  auto admit = [&](std::uint64_t idx) {
    const Clause c = decode_clause(idx, n, k);
    return std::any_of(c.begin(), c.end(), [&](const Literal& l) { return literal_true(l, sigma); });
  };
  return build_cnf(n, k, sample_indices(universe, admissible, m, rng, opts, admit));
}

HypergraphInstance plant_hypergraph(const Assignment& sigma, std::uint64_t m, unsigned k, Seed seed,
                                    SamplingOptions opts) {
  const unsigned n = static_cast<unsigned>(sigma.size());
  check_width(n, k);
  if (sigma.domain_size != 2) {
    throw ParameterError("plant_hypergraph: assignment must be a 2-coloring");
  }
  const auto universe = universe_size(Ensemble::nae, n, k);
  Rng rng(seed);
  std::vector<std::uint32_t> buf(k);
  auto admit = [&](std::uint64_t idx) {
    unrank_combination(idx, n, k, buf);
    bool zero = false;
    bool one = false;
    for (auto v : buf) {
      (sigma[v] ? one : zero) = true;
    }
    return zero && one;
  };
  return build_hypergraph(n, k, sample_indices(universe, nae_compatible_count(sigma, k), m, rng, opts, admit));
}

Assignment sample_assignment(unsigned n, unsigned k, PlantBalance balance, Rng& rng) {
  std::vector<std::uint8_t> values(n);
  if (balance == PlantBalance::uniform) {
    for (auto& v : values) {
      v = static_cast<std::uint8_t>(rng.below(k));
    }
  } else {
    std::vector<std::uint8_t> labels(k);
    std::iota(labels.begin(), labels.end(), std::uint8_t{0});
    rng.shuffle(std::span<std::uint8_t>(labels));
    for (unsigned i = 0; i < n; ++i) {
      values[i] = labels[i % k];
    }
    rng.shuffle(std::span<std::uint8_t>(values));
  }
  return Assignment(std::move(values), k);
}

namespace {

/// Samples sigma until `admissible(sigma) >= m`, at most opts.max_resamples + 1 draws.
template <class Count>
Assignment draw_plantable(unsigned n, unsigned k, std::uint64_t m, const PlantOptions& opts, Rng& rng,
                          Count&& admissible, const char* what) {
  for (unsigned attempt = 0; attempt <= opts.max_resamples; ++attempt) {
    Assignment sigma = sample_assignment(n, k, opts.balance, rng);
    if (opts.sampling.mode == SamplingMode::independent || admissible(sigma) >= m) {
      return sigma;
    }
  }
  throw ParameterError(std::string(what) + ": no sampled assignment admits " + std::to_string(m) +
                       " compatible constraints after " + std::to_string(opts.max_resamples) + " resamples");
}

}  // namespace

Planted<GraphInstance> gen_planted_coloring(unsigned n, std::uint64_t m, unsigned k, Seed seed, PlantOptions opts) {
  if (k < 2) {
    throw ParameterError("coloring: k must be at least 2");
  }
  Rng rng(seed);
  Assignment sigma = draw_plantable(
      n, k, m, opts, rng, [](const Assignment& s) { return bichromatic_pair_count(s); }, "planted coloring");
  GraphInstance g = plant_graph(sigma, m, derive_seed(seed, 1), opts.sampling);
  return {std::move(g), std::move(sigma)};
}

Planted<CnfInstance> gen_planted_cnf(unsigned n, std::uint64_t m, unsigned k, Seed seed, PlantOptions opts) {
  check_width(n, k);
  const auto admissible = universe_size(Ensemble::sat, n, k) - binomial_checked(n, k);
  if (opts.sampling.mode == SamplingMode::without_replacement && m > admissible) {
    throw ParameterError("planted sat: m exceeds (2^k - 1) C(n,k)");
  }
  Rng rng(seed);
  Assignment sigma = sample_assignment(n, 2, opts.balance, rng);
  CnfInstance f = plant_cnf(sigma, m, k, derive_seed(seed, 1), opts.sampling);
  return {std::move(f), std::move(sigma)};
}

Planted<HypergraphInstance> gen_planted_nae(unsigned n, std::uint64_t m, unsigned k, Seed seed, PlantOptions opts) {
  check_width(n, k);
  Rng rng(seed);
  Assignment sigma = draw_plantable(
      n, 2, m, opts, rng, [k](const Assignment& s) { return nae_compatible_count(s, k); }, "planted nae");
  HypergraphInstance h = plant_hypergraph(sigma, m, k, derive_seed(seed, 1), opts.sampling);
  return {std::move(h), std::move(sigma)};
}

}  // namespace cspgeo
