#include "support/oracles.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <variant>

namespace oracle {

using namespace cspgeo;

unsigned violations(const Instance& inst, const Assignment& a) {
  unsigned count = 0;
  if (const auto* g = std::get_if<GraphInstance>(&inst)) {
    for (const auto& e : g->edges) {
      count += a[e.u] == a[e.v] ? 1 : 0;
    }
  } else if (const auto* f = std::get_if<CnfInstance>(&inst)) {
    for (const auto& c : f->clauses) {
      bool sat = false;
      for (const auto& l : c) {
        // value 1 is true; a negated literal is true on value 0
        sat = sat || (a[l.var] == 1) != l.negated;
      }
      count += sat ? 0 : 1;
    }
  } else {
    for (const auto& e : std::get<HypergraphInstance>(inst).edges) {
      std::set<int> seen;
      for (auto v : e) {
        seen.insert(a[v]);
      }
      count += seen.size() == 1 ? 1 : 0;
    }
  }
  return count;
}

void for_each_assignment(unsigned n, unsigned k, const std::function<void(const Assignment&)>& visit) {
  Assignment a(std::vector<std::uint8_t>(n, 0), k);
  while (true) {
    visit(a);
    int i = static_cast<int>(n) - 1;
    while (i >= 0 && a[i] + 1U == k) {
      a[i] = 0;
      --i;
    }
    if (i < 0) {
      return;
    }
    ++a[i];
  }
}

std::vector<Assignment> solutions(const Instance& inst) {
  std::vector<Assignment> out;
  for_each_assignment(variable_count(inst), domain_size(inst), [&](const Assignment& a) {
    if (violations(inst, a) == 0) {
      out.push_back(a);
    }
  });
  return out;
}

std::size_t distance(const Assignment& a, const Assignment& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] != b[i] ? 1 : 0;
  }
  return d;
}

std::vector<std::uint32_t> components(const std::vector<Assignment>& sols, unsigned radius) {
  constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(sols.size(), unset);
  std::uint32_t next = 0;
  for (std::size_t s = 0; s < sols.size(); ++s) {
    if (label[s] != unset) {
      continue;
    }
    std::deque<std::size_t> queue{s};
    label[s] = next;
    while (!queue.empty()) {
      const auto cur = queue.front();
      queue.pop_front();
      for (std::size_t o = 0; o < sols.size(); ++o) {
        if (label[o] == unset && distance(sols[cur], sols[o]) <= radius) {
          label[o] = next;
          queue.push_back(o);
        }
      }
    }
    ++next;
  }
  return label;
}

namespace {

std::uint64_t encode(const Assignment& a, unsigned k) {
  std::uint64_t code = 0;
  for (auto v : a.values) {
    code = code * k + v;
  }
  return code;
}

}  // namespace

unsigned path_height(const Instance& inst, const Assignment& sigma, const Assignment& tau) {
  const unsigned n = variable_count(inst);
  const unsigned k = domain_size(inst);
  std::vector<unsigned> energy;
  for_each_assignment(n, k, [&](const Assignment& a) { energy.push_back(violations(inst, a)); });
  const std::uint64_t start = encode(sigma, k);
  const std::uint64_t goal = encode(tau, k);
  std::vector<std::uint64_t> place(n, 1);
  for (int i = static_cast<int>(n) - 2; i >= 0; --i) {
    place[i] = place[i + 1] * k;
  }
  for (unsigned h = 0;; ++h) {
    if (energy[start] > h || energy[goal] > h) {
      continue;
    }
    std::vector<char> seen(energy.size(), 0);
    std::deque<std::uint64_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const auto cur = queue.front();
      queue.pop_front();
      if (cur == goal) {
        return h;
      }
      for (unsigned v = 0; v < n; ++v) {
        const auto digit = (cur / place[v]) % k;
        for (unsigned j = 0; j < k; ++j) {
          if (j == digit) {
            continue;
          }
          const auto nb = cur - digit * place[v] + j * place[v];
          if (!seen[nb] && energy[nb] <= h) {
            seen[nb] = 1;
            queue.push_back(nb);
          }
        }
      }
    }
  }
}

Status classify(const std::vector<Assignment>& sols, const Assignment& sigma) {
  constexpr auto inf = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = sigma.size();
  const unsigned k = sigma.domain_size;
  Status st{std::vector<std::uint32_t>(n, inf), std::vector<std::uint32_t>(n, 0)};
  for (std::size_t v = 0; v < n; ++v) {
    for (unsigned j = 0; j < k; ++j) {
      std::uint32_t best = inf;
      for (const auto& t : sols) {
        if (t[v] == j) {
          best = std::min<std::uint32_t>(best, static_cast<std::uint32_t>(distance(sigma, t)));
        }
      }
      st.loose[v] = std::max(st.loose[v], best);
      if (j != sigma[v]) {
        st.rigid[v] = std::min(st.rigid[v], best);
      }
    }
  }
  return st;
}

std::map<std::uint64_t, std::uint64_t> histogram(const Instance& inst, const Assignment& sigma,
                                                 unsigned max_violations) {
  std::map<std::uint64_t, std::uint64_t> out;
  const unsigned k = domain_size(inst);
  for_each_assignment(variable_count(inst), k, [&](const Assignment& t) {
    if (violations(inst, t) > max_violations) {
      return;
    }
    std::vector<std::uint64_t> cells(k * k, 0);
    for (std::size_t v = 0; v < t.size(); ++v) {
      ++cells[sigma[v] * k + t[v]];
    }
    std::uint64_t key = 0;
    for (auto c : cells) {
      key += c * c;
    }
    ++out[key];
  });
  return out;
}

Instance random_small_instance(Ensemble e, std::uint64_t seed) {
  Rng rng(Seed{seed});
  switch (e) {
    case Ensemble::coloring: {
      const unsigned k = 2 + static_cast<unsigned>(rng.below(2));       // 2 or 3 colors
      const unsigned n = 3 + static_cast<unsigned>(rng.below(k == 2 ? 12 : 8));  // 2^14 or 3^10 at most
      const std::uint64_t pairs = n * (n - 1ULL) / 2;
      const std::uint64_t m = rng.below(std::min<std::uint64_t>(pairs, 2ULL * n) + 1);
      return gen_uniform_graph(n, m, k, Seed{rng()});
    }
    case Ensemble::sat: {
      const unsigned k = 2 + static_cast<unsigned>(rng.below(2));
      const unsigned n = 4 + static_cast<unsigned>(rng.below(12));  // up to 2^15
      const std::uint64_t m = rng.below(5ULL * n + 1);
      return gen_uniform_cnf(n, m, k, Seed{rng()});
    }
    case Ensemble::nae: {
      const unsigned k = 3 + static_cast<unsigned>(rng.below(2));
      const unsigned n = 5 + static_cast<unsigned>(rng.below(11));
      const std::uint64_t m = rng.below(std::min<std::uint64_t>(2ULL * n, universe_size(e, n, k)) + 1);
      return gen_uniform_hypergraph(n, m, k, Seed{rng()});
    }
  }
  return {};
}

}  // namespace oracle
