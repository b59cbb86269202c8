#include "cspgeo/processes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>

#include "cspgeo/errors.hpp"
#include "cspgeo/landscape.hpp"

namespace cspgeo {

namespace {

std::vector<std::vector<std::uint32_t>> adjacency(const GraphInstance& g) {
  std::vector<std::vector<std::uint32_t>> adj(g.n);
  for (const auto& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

void require_proper(const GraphInstance& g, const Assignment& sigma, const char* what) {
  const Instance inst = g;
  validate_assignment(inst, sigma);
  if (violated_count(inst, sigma) != 0) {
    throw ParameterError(std::string(what) + ": sigma is not a proper coloring");
  }
}

/// Backtracking list coloring of `order` with lists; other vertices keep `base`.
class ListColorer {
 public:
  ListColorer(const std::vector<std::vector<std::uint32_t>>& adj, std::vector<std::uint8_t>& colors,
              const std::vector<bool>& in_set, std::uint64_t budget)
      : adj_(adj), colors_(colors), in_set_(in_set), assigned_(colors.size(), false), budget_(budget) {}

  bool solve(const std::vector<std::uint32_t>& order, const std::vector<std::vector<std::uint8_t>>& lists) {
    return rec(order, lists, 0);
  }

  [[nodiscard]] std::uint64_t nodes() const noexcept { return nodes_; }
  [[nodiscard]] bool exhausted() const noexcept { return exhausted_; }

 private:
  bool rec(const std::vector<std::uint32_t>& order, const std::vector<std::vector<std::uint8_t>>& lists,
           std::size_t i) {
    if (i == order.size()) {
      return true;
    }
    const auto w = order[i];
    for (auto c : lists[i]) {
      if (++nodes_ > budget_) {
        exhausted_ = true;
        return false;
      }
      bool ok = true;
      for (auto u : adj_[w]) {
        if ((!in_set_[u] || assigned_[u]) && colors_[u] == c) {
          ok = false;
          break;
        }
      }
      if (!ok) {
        continue;
      }
      colors_[w] = c;
      assigned_[w] = true;
      if (rec(order, lists, i + 1)) {
        return true;
      }
      assigned_[w] = false;
      if (exhausted_) {
        return false;
      }
    }
    return false;
  }

  const std::vector<std::vector<std::uint32_t>>& adj_;
  std::vector<std::uint8_t>& colors_;
  const std::vector<bool>& in_set_;
  std::vector<bool> assigned_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace

RecolorTrace recolor_process(const GraphInstance& g, const Assignment& sigma, std::uint32_t v0,
                             std::uint8_t target, Seed seed, RecolorOptions opts) {
  require_proper(g, sigma, "recolor_process");
  if (v0 >= g.n) {
    throw ParameterError("recolor_process: v0 out of range");
  }
  if (target >= g.k || target == sigma[v0]) {
    throw ParameterError("recolor_process: target color must differ from sigma(v0) and lie in [k]");
  }
  if (opts.q < 2) {
    throw ParameterError("recolor_process: q must be at least 2");
  }
  Rng rng(seed);
  const auto adj = adjacency(g);
  const unsigned k = g.k;

  RecolorTrace trace;
  trace.v0 = v0;
  trace.target = target;
  trace.q = opts.q;
  trace.dead.push_back(DeadVertex{v0, false, {target}, {}});

  enum class State : std::uint8_t { asleep, awake, dead };
  std::vector<State> state(g.n, State::asleep);
  state[v0] = State::dead;
  std::deque<std::uint32_t> awake;
  for (auto u : adj[v0]) {
    if (sigma[u] == target) {
      state[u] = State::awake;
      awake.push_back(u);
      trace.dead[0].woke.push_back(u);
    }
  }

  std::vector<unsigned> per_class(k);
  std::vector<std::uint8_t> palette(k);
  while (!awake.empty()) {
    const auto w = awake.front();
    awake.pop_front();
    state[w] = State::dead;
    DeadVertex rec{w, false, {}, {}};

    std::fill(per_class.begin(), per_class.end(), 0U);
    for (auto u : adj[w]) {
      ++per_class[sigma[u]];
    }
    std::vector<std::uint8_t> free;
    for (unsigned c = 0; c < k; ++c) {
      if (per_class[c] == 0) {
        free.push_back(static_cast<std::uint8_t>(c));
      }
    }
    if (free.size() >= opts.q) {
      rng.shuffle(std::span<std::uint8_t>(free));
      free.resize(opts.q);
      rec.had_free_colors = true;
      rec.colors = std::move(free);
    } else {
      std::iota(palette.begin(), palette.end(), std::uint8_t{0});
      rng.shuffle(std::span<std::uint8_t>(palette));
      rec.colors.assign(palette.begin(), palette.begin() + std::min<std::size_t>(opts.q, k));
      for (auto u : adj[w]) {
        if (state[u] == State::asleep &&
            std::find(rec.colors.begin(), rec.colors.end(), sigma[u]) != rec.colors.end()) {
          state[u] = State::awake;
          awake.push_back(u);
          rec.woke.push_back(u);
        }
      }
    }
    std::sort(rec.colors.begin(), rec.colors.end());
    trace.dead.push_back(std::move(rec));
  }

  std::vector<bool> in_dead(g.n, false);
  std::vector<std::uint32_t> order;
  std::vector<std::vector<std::uint8_t>> lists;
  for (const auto& d : trace.dead) {
    in_dead[d.vertex] = true;
    order.push_back(d.vertex);
    if (d.vertex == v0) {
      lists.push_back({target});
    } else {
      std::vector<std::uint8_t> l;
      for (auto c : d.colors) {
        if (c != target) {
          l.push_back(c);
        }
      }
      lists.push_back(std::move(l));
    }
  }
  std::vector<std::uint8_t> colors(sigma.values);
  ListColorer colorer(adj, colors, in_dead, opts.list_coloring_budget);
  const bool ok = colorer.solve(order, lists);
  trace.list_coloring_nodes = colorer.nodes();
  if (ok) {
    trace.tau = Assignment(std::move(colors), k);
  } else if (colorer.exhausted()) {
    trace.failure = "list-coloring search budget exhausted";
  } else {
    trace.failure = "dead set is not colorable from its lists";
  }
  return trace;
}

// ---------------------------------------------------------------------------

std::string_view to_string(CorePhase p) {
  switch (p) {
    case CorePhase::W:
      return "W";
    case CorePhase::U:
      return "U";
    case CorePhase::Z:
      return "Z";
    case CorePhase::Z0:
      return "Z0";
  }
  return "?";
}

CoreResult strip_core_coloring(const GraphInstance& g, const Assignment& sigma, double gamma, StripOptions opts) {
  require_proper(g, sigma, "strip_core_coloring");
  if (!(gamma > 0)) {
    throw ParameterError("strip_core_coloring: gamma must be positive");
  }
  const unsigned n = g.n;
  const unsigned k = g.k;
  const double lnk = std::log(static_cast<double>(k));
  const auto adj = adjacency(g);

  CoreResult res;
  res.gamma = gamma;
  res.beta = gamma / 2;

  // Step 1: W_i = {v in V_i : e(v, V_j) < gamma ln k for some j != i}.
  std::vector<bool> in_w(n, false);
  std::vector<unsigned> per_class(k);
  for (std::uint32_t v = 0; v < n; ++v) {
    std::fill(per_class.begin(), per_class.end(), 0U);
    for (auto u : adj[v]) {
      ++per_class[sigma[u]];
    }
    for (unsigned j = 0; j < k; ++j) {
      if (j != sigma[v] && static_cast<double>(per_class[j]) < gamma * lnk) {
        in_w[v] = true;
        break;
      }
    }
    if (in_w[v]) {
      res.removals.push_back({v, CorePhase::W});
    }
  }

  // Step 2: U_il = {v in V_l : e(v, W_i) > (gamma/2) ln k}, i != l.
  std::vector<bool> in_z(n, false);
  std::deque<std::uint32_t> queue;
  for (std::uint32_t v = 0; v < n; ++v) {
    std::fill(per_class.begin(), per_class.end(), 0U);
    for (auto u : adj[v]) {
      if (in_w[u]) {
        ++per_class[sigma[u]];
      }
    }
    for (unsigned i = 0; i < k; ++i) {
      if (i != sigma[v] && static_cast<double>(per_class[i]) > 0.5 * gamma * lnk) {
        in_z[v] = true;
        queue.push_back(v);
        if (!in_w[v]) {
          res.removals.push_back({v, CorePhase::U});
        }
        break;
      }
    }
  }

  // Step 3: close Z under "at least z_neighbor_threshold neighbors in Z".
  std::vector<unsigned> z_neighbors(n, 0);
  while (!queue.empty()) {
    const auto z = queue.front();
    queue.pop_front();
    for (auto u : adj[z]) {
      if (!in_z[u] && ++z_neighbors[u] >= opts.z_neighbor_threshold) {
        in_z[u] = true;
        queue.push_back(u);
        if (!in_w[u]) {
          res.removals.push_back({u, CorePhase::Z});
        }
      }
    }
  }

  // Step 4.
  std::vector<bool> in_core(n, false);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (!in_w[v] && !in_z[v]) {
      in_core[v] = true;
      res.core.push_back(v);
    }
  }

  // Core property: at least beta ln k core neighbors in each other class.
  for (auto v : res.core) {
    std::fill(per_class.begin(), per_class.end(), 0U);
    for (auto u : adj[v]) {
      if (in_core[u]) {
        ++per_class[sigma[u]];
      }
    }
    for (unsigned i = 0; i < k; ++i) {
      if (i != sigma[v] && static_cast<double>(per_class[i]) < res.beta * lnk) {
        res.failing.push_back(v);
        break;
      }
    }
  }
  res.verified = res.failing.empty();
  return res;
}

namespace {

void require_satisfying(const CnfInstance& f, const Assignment& sigma, const char* what) {
  const Instance inst = f;
  validate_assignment(inst, sigma);
  if (violated_count(inst, sigma) != 0) {
    throw ParameterError(std::string(what) + ": sigma does not satisfy the formula");
  }
}

bool is_true(const Literal& l, const Assignment& a) { return (a[l.var] != 0) != l.negated; }

/// Index of the unique true literal's variable, or -1.
std::int64_t unique_supporter(const Clause& c, const Assignment& a) {
  std::int64_t who = -1;
  for (const auto& l : c) {
    if (is_true(l, a)) {
      if (who >= 0) {
        return -1;
      }
      who = l.var;
    }
  }
  return who;
}

}  // namespace

std::size_t support_count(const CnfInstance& f, const Assignment& sigma, std::uint32_t variable) {
  require_satisfying(f, sigma, "support_count");
  if (variable >= f.n) {
    throw ParameterError("support_count: variable out of range");
  }
  std::size_t count = 0;
  for (const auto& c : f.clauses) {
    if (unique_supporter(c, sigma) == static_cast<std::int64_t>(variable)) {
      ++count;
    }
  }
  return count;
}

CoreResult support_core_sat(const CnfInstance& f, const Assignment& sigma, double gamma) {
  require_satisfying(f, sigma, "support_core_sat");
  if (!(gamma > 0)) {
    throw ParameterError("support_core_sat: gamma must be positive");
  }
  const unsigned n = f.n;
  const double lnk = std::log(static_cast<double>(f.k));
  CoreResult res;
  res.gamma = gamma;
  res.beta = gamma;

  // Xi: uniquely satisfied clauses with their supporter.
  std::vector<std::uint32_t> xi;
  std::vector<std::uint32_t> supporter;
  std::vector<std::vector<std::uint32_t>> xi_of_var(n);  // Xi clauses containing the variable
  std::vector<std::size_t> support(n, 0);
  for (std::uint32_t c = 0; c < f.clauses.size(); ++c) {
    const auto s = unique_supporter(f.clauses[c], sigma);
    if (s < 0) {
      continue;
    }
    const auto slot = static_cast<std::uint32_t>(xi.size());
    xi.push_back(c);
    supporter.push_back(static_cast<std::uint32_t>(s));
    ++support[s];
    for (const auto& l : f.clauses[c]) {
      xi_of_var[l.var].push_back(slot);
    }
  }

  std::vector<bool> in_z(n, false);
  std::deque<std::uint32_t> queue;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (static_cast<double>(support[v]) < 2 * gamma * lnk) {
      in_z[v] = true;
      queue.push_back(v);
      res.removals.push_back({v, CorePhase::Z0});
    }
  }
  // touching[v]: supported clauses of v that contain a variable of Z.
  std::vector<bool> touched(xi.size(), false);
  std::vector<std::size_t> touching(n, 0);
  while (!queue.empty()) {
    const auto z = queue.front();
    queue.pop_front();
    for (auto slot : xi_of_var[z]) {
      if (touched[slot]) {
        continue;
      }
      touched[slot] = true;
      const auto x = supporter[slot];
      if (!in_z[x] && x != z && static_cast<double>(++touching[x]) >= gamma * lnk) {
        in_z[x] = true;
        queue.push_back(x);
        res.removals.push_back({x, CorePhase::Z});
      }
    }
  }

  for (std::uint32_t v = 0; v < n; ++v) {
    if (!in_z[v]) {
      res.core.push_back(v);
    }
  }
  auto inside = [&](const Clause& c) {
    return std::all_of(c.begin(), c.end(), [&](const Literal& l) { return !in_z[l.var]; });
  };
  // Reading 1 (asserted): supported clauses lying inside U.
  std::vector<std::size_t> inside_support(n, 0);
  for (std::size_t slot = 0; slot < xi.size(); ++slot) {
    if (inside(f.clauses[xi[slot]])) {
      ++inside_support[supporter[slot]];
    }
  }
  // Reading 2: clauses inside U in which the variable's literal is true, unique or not.
  std::vector<std::size_t> inside_true(n, 0);
  for (const auto& c : f.clauses) {
    if (!inside(c)) {
      continue;
    }
    for (const auto& l : c) {
      if (is_true(l, sigma)) {
        ++inside_true[l.var];
      }
    }
  }
  bool occurrence_ok = true;
  for (auto v : res.core) {
    if (static_cast<double>(inside_support[v]) < gamma * lnk) {
      res.failing.push_back(v);
    }
    if (static_cast<double>(inside_true[v]) < gamma * lnk) {
      occurrence_ok = false;
    }
  }
  res.verified = res.failing.empty();
  res.occurrence_reading_verified = occurrence_ok;
  return res;
}

// ---------------------------------------------------------------------------

double rigidity_size_bound(unsigned n, unsigned k) {
  return static_cast<double>(n) / (static_cast<double>(k) * std::log(static_cast<double>(k)));
}

namespace {

struct ScopeMasks {
  std::vector<std::vector<std::uint32_t>> scopes;
};

std::vector<std::vector<std::uint32_t>> scopes_of(const Instance& inst) {
  const CompiledInstance ci(inst);
  std::vector<std::vector<std::uint32_t>> out(ci.constraint_count());
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto s = ci.scope(c);
    out[c].assign(s.begin(), s.end());
  }
  return out;
}

}  // namespace

SparsityResult sparsity_check(const Instance& inst, std::size_t subset_size_bound, double edge_factor,
                              SparsityOptions opts) {
  if (subset_size_bound == 0 || !(edge_factor > 0)) {
    throw ParameterError("sparsity_check: bounds must be positive");
  }
  const unsigned n = variable_count(inst);
  const auto scopes = scopes_of(inst);
  const std::size_t bound = std::min<std::size_t>(subset_size_bound, n);
  SparsityResult res;

  auto consider = [&](const std::vector<std::uint32_t>& set, std::size_t spanned) {
    const double density = static_cast<double>(spanned) / static_cast<double>(set.size());
    const bool bad = static_cast<double>(spanned) >= static_cast<double>(set.size()) * edge_factor;
    if ((bad && !res.violated) || (bad == res.violated && (res.witness.empty() || density > res.witness_density))) {
      res.violated = res.violated || bad;
      res.witness = set;
      res.witness_constraints = spanned;
      res.witness_density = density;
    }
  };

  if (n == 0 || scopes.empty()) {
    return res;
  }

  if (n <= opts.exhaustive_max_n && n < 32) {
    std::vector<std::uint32_t> masks;
    masks.reserve(scopes.size());
    for (const auto& s : scopes) {
      std::uint32_t m = 0;
      for (auto v : s) {
        m |= 1U << v;
      }
      masks.push_back(m);
    }
    std::vector<std::uint32_t> set;
    for (std::size_t size = 1; size <= bound; ++size) {
      // Gosper's hack over all subsets of the given size.
      std::uint32_t s = (1U << size) - 1;
      const std::uint32_t limit = 1U << n;
      while (s < limit) {
        std::size_t spanned = 0;
        for (auto m : masks) {
          spanned += std::popcount(m & s) >= 2 ? 1 : 0;
        }
        set.clear();
        for (unsigned v = 0; v < n; ++v) {
          if ((s >> v) & 1U) {
            set.push_back(v);
          }
        }
        consider(set, spanned);
        const std::uint32_t c = s & (0 - s);
        const std::uint32_t r = s + c;
        if (r == 0) {
          break;
        }
        s = (((r ^ s) >> 2) / c) | r;
      }
    }
    return res;
  }

  // Randomized greedy growth; absence of a witness is only heuristic evidence.
  res.exhaustive = false;
  std::vector<std::vector<std::uint32_t>> occ(n);
  for (std::uint32_t c = 0; c < scopes.size(); ++c) {
    for (auto v : scopes[c]) {
      occ[v].push_back(c);
    }
  }
  Rng rng(opts.seed);
  std::vector<unsigned> inside(scopes.size());
  std::vector<bool> member(n);
  std::vector<std::uint32_t> set;
  for (unsigned restart = 0; restart < opts.heuristic_restarts; ++restart) {
    std::fill(inside.begin(), inside.end(), 0U);
    std::fill(member.begin(), member.end(), false);
    set.clear();
    std::size_t spanned = 0;
    auto add = [&](std::uint32_t v) {
      member[v] = true;
      set.push_back(v);
      for (auto c : occ[v]) {
        if (++inside[c] == 2) {
          ++spanned;
        }
      }
    };
    add(static_cast<std::uint32_t>(rng.below(n)));
    consider(set, spanned);
    while (set.size() < bound) {
      std::size_t best_gain = 0;
      std::vector<std::uint32_t> best;
      for (std::uint32_t v = 0; v < n; ++v) {
        if (member[v]) {
          continue;
        }
        std::size_t gain = 0;
        for (auto c : occ[v]) {
          gain += inside[c] == 1 ? 1 : 0;
        }
        if (gain > best_gain) {
          best_gain = gain;
          best.assign(1, v);
        } else if (gain == best_gain) {
          best.push_back(v);
        }
      }
      if (best.empty()) {
        break;
      }
      add(best[rng.below(best.size())]);
      auto sorted = set;
      std::sort(sorted.begin(), sorted.end());
      consider(sorted, spanned);
    }
  }
  return res;
}

}  // namespace cspgeo
