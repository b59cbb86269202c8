#include "cspgeo/landscape.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "cspgeo/combinatorics.hpp"
#include "cspgeo/detail/union_find.hpp"
#include "cspgeo/errors.hpp"

namespace cspgeo {

CompiledInstance::CompiledInstance(const Instance& inst)
    : ensemble_(ensemble_of(inst)), n_(cspgeo::variable_count(inst)), k_(cspgeo::domain_size(inst)) {
  validate(inst);
  offsets_.push_back(0);
  std::visit(
      [&](const auto& i) {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, GraphInstance>) {
          for (const auto& e : i.edges) {
            vars_.push_back(e.u);
            vars_.push_back(e.v);
            negated_.push_back(0);
            negated_.push_back(0);
            offsets_.push_back(static_cast<std::uint32_t>(vars_.size()));
          }
        } else if constexpr (std::is_same_v<T, CnfInstance>) {
          for (const auto& c : i.clauses) {
            for (const auto& l : c) {
              vars_.push_back(l.var);
              negated_.push_back(l.negated ? 1 : 0);
            }
            offsets_.push_back(static_cast<std::uint32_t>(vars_.size()));
          }
        } else {
          for (const auto& e : i.edges) {
            for (auto v : e) {
              vars_.push_back(v);
              negated_.push_back(0);
            }
            offsets_.push_back(static_cast<std::uint32_t>(vars_.size()));
          }
        }
      },
      inst);
  occ_.resize(n_);
  closing_.resize(n_);
  for (std::size_t c = 0; c + 1 < offsets_.size(); ++c) {
    std::uint32_t top = 0;
    for (auto v : scope(c)) {
      occ_[v].push_back(static_cast<std::uint32_t>(c));
      top = std::max(top, v);
    }
    if (!scope(c).empty()) {
      closing_[top].push_back(static_cast<std::uint32_t>(c));
    }
  }
}

bool CompiledInstance::violated(std::size_t c, const std::uint8_t* values) const noexcept {
  const std::uint32_t begin = offsets_[c];
  const std::uint32_t end = offsets_[c + 1];
  switch (ensemble_) {
    case Ensemble::coloring:
      return values[vars_[begin]] == values[vars_[begin + 1]];
    case Ensemble::sat:
      for (std::uint32_t i = begin; i < end; ++i) {
        if ((values[vars_[i]] != 0) != (negated_[i] != 0)) {
          return false;
        }
      }
      return true;
    case Ensemble::nae: {
      const std::uint8_t first = values[vars_[begin]];
      for (std::uint32_t i = begin + 1; i < end; ++i) {
        if (values[vars_[i]] != first) {
          return false;
        }
      }
      return true;
    }
  }
  return false;
}

unsigned CompiledInstance::energy(const std::uint8_t* values) const noexcept {
  unsigned h = 0;
  for (std::size_t c = 0; c + 1 < offsets_.size(); ++c) {
    h += violated(c, values) ? 1U : 0U;
  }
  return h;
}

int CompiledInstance::change_delta(std::uint32_t v, std::uint8_t value, std::uint8_t* values) const noexcept {
  const std::uint8_t old = values[v];
  if (old == value) {
    return 0;
  }
  int delta = 0;
  for (auto c : occ_[v]) {
    delta -= violated(c, values) ? 1 : 0;
  }
  values[v] = value;
  for (auto c : occ_[v]) {
    delta += violated(c, values) ? 1 : 0;
  }
  values[v] = old;
  return delta;
}

unsigned violated_count(const Instance& inst, const Assignment& a) {
  validate_assignment(inst, a);
  const CompiledInstance ci(inst);
  return ci.energy(a.values.data());
}

// ---------------------------------------------------------------------------

PackedLayout::PackedLayout(unsigned n, unsigned k) : n_(n), k_(k) {
  if (k < 2) {
    throw ParameterError("PackedLayout: domain size must be at least 2");
  }
  width_ = static_cast<unsigned>(std::bit_width(k - 1));
  if (n == 0 || static_cast<std::uint64_t>(n) * width_ > 64) {
    throw ResourceError("cannot pack " + std::to_string(n) + " variables of domain " + std::to_string(k) +
                        " into 64 bits");
  }
  field_mask_ = (std::uint64_t{1} << width_) - 1;
  low_bits_ = 0;
  for (unsigned i = 0; i < n; ++i) {
    low_bits_ |= std::uint64_t{1} << (i * width_);
  }
}

std::uint64_t PackedLayout::encode(std::span<const std::uint8_t> values) const noexcept {
  std::uint64_t code = 0;
  for (unsigned i = 0; i < n_; ++i) {
    code = (code << width_) | values[i];
  }
  return code;
}

void PackedLayout::decode(std::uint64_t code, std::span<std::uint8_t> out) const noexcept {
  for (unsigned i = n_; i-- > 0;) {
    out[i] = static_cast<std::uint8_t>(code & field_mask_);
    code >>= width_;
  }
}

unsigned PackedLayout::hamming(std::uint64_t a, std::uint64_t b) const noexcept {
  const std::uint64_t x = a ^ b;
  std::uint64_t y = x;
  for (unsigned s = 1; s < width_; ++s) {
    y |= x >> s;
  }
  return static_cast<unsigned>(std::popcount(y & low_bits_));
}

// ---------------------------------------------------------------------------

SolutionSet::SolutionSet(Instance inst, std::vector<std::uint64_t> codes)
    : instance_(std::move(inst)),
      layout_(std::max(1U, variable_count(instance_)), domain_size(instance_)),
      codes_(std::move(codes)) {
  if (codes_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ResourceError("solution set too large to index");
  }
  by_code_.resize(codes_.size());
  for (std::uint32_t i = 0; i < by_code_.size(); ++i) {
    by_code_[i] = i;
  }
  std::sort(by_code_.begin(), by_code_.end(), [&](auto a, auto b) { return codes_[a] < codes_[b]; });
  for (std::size_t i = 1; i < by_code_.size(); ++i) {
    if (codes_[by_code_[i - 1]] == codes_[by_code_[i]]) {
      throw ParameterError("SolutionSet: duplicate assignment");
    }
  }
  const CompiledInstance ci(instance_);
  std::vector<std::uint8_t> buf(layout_.variable_count());
  const std::uint64_t limit =
      layout_.width() * layout_.variable_count() == 64 ? ~std::uint64_t{0}
                                                       : (std::uint64_t{1} << (layout_.width() * layout_.variable_count()));
  for (auto c : codes_) {
    if (c >= limit && limit != ~std::uint64_t{0}) {
      throw ParameterError("SolutionSet: code out of range");
    }
    layout_.decode(c, buf);
    for (auto v : buf) {
      if (v >= layout_.domain_size()) {
        throw ParameterError("SolutionSet: digit outside domain");
      }
    }
    if (variable_count(instance_) > 0 && ci.energy(buf.data()) != 0) {
      throw ParameterError("SolutionSet: member violates a constraint");
    }
  }
}

Assignment SolutionSet::assignment(std::size_t i) const {
  std::vector<std::uint8_t> values(layout_.variable_count());
  layout_.decode(codes_.at(i), values);
  values.resize(variable_count(instance_));
  return Assignment(std::move(values), layout_.domain_size());
}

std::optional<std::size_t> SolutionSet::find(std::uint64_t code) const noexcept {
  auto it = std::lower_bound(by_code_.begin(), by_code_.end(), code,
                             [&](std::uint32_t ord, std::uint64_t c) { return codes_[ord] < c; });
  if (it != by_code_.end() && codes_[*it] == code) {
    return *it;
  }
  return std::nullopt;
}

std::optional<std::size_t> SolutionSet::find(const Assignment& a) const {
  validate_assignment(instance_, a);
  return find(layout_.encode(a.values));
}

// ---------------------------------------------------------------------------

std::uint64_t state_space_size(unsigned n, unsigned k, std::uint64_t budget) {
  const auto total = checked_pow(k, n);
  if (!total || *total > budget) {
    throw ResourceError("state space " + std::to_string(k) + "^" + std::to_string(n) + " exceeds budget " +
                        std::to_string(budget));
  }
  return *total;
}

SolutionSet enumerate_solutions(const Instance& inst, std::uint64_t budget) {
  const CompiledInstance ci(inst);
  const unsigned n = ci.variable_count();
  const unsigned k = ci.domain_size();
  if (n == 0) {
    throw ParameterError("enumerate_solutions: instance has no variables");
  }
  const PackedLayout layout(n, k);
  std::vector<std::uint8_t> values(n, 0);
  std::vector<std::uint64_t> codes;
  std::uint64_t nodes = 0;

  // Iterative DFS; values[depth] is the value currently tried at depth.
  unsigned depth = 0;
  values[0] = 0;
  while (true) {
    if (++nodes > budget) {
      throw ResourceError("enumerate_solutions: search budget of " + std::to_string(budget) +
                          " nodes exceeded");
    }
    bool ok = true;
    for (auto c : ci.closing(depth)) {
      if (ci.violated(c, values.data())) {
        ok = false;
        break;
      }
    }
    if (ok && depth + 1 == n) {
      codes.push_back(layout.encode(values));
    } else if (ok) {
      ++depth;
      values[depth] = 0;
      continue;
    }
    // Advance to the next sibling, backtracking past exhausted levels.
    while (values[depth] + 1U == k) {
      if (depth == 0) {
        return SolutionSet(inst, std::move(codes));
      }
      --depth;
    }
    ++values[depth];
  }
}

// ---------------------------------------------------------------------------

namespace {

/// Visits every code at Hamming distance exactly d from `code`.
template <class Visit>
void for_each_in_sphere(const PackedLayout& layout, std::uint64_t code, unsigned d, Visit&& visit) {
  const unsigned n = layout.variable_count();
  const unsigned k = layout.domain_size();
  auto rec = [&](auto&& self, unsigned start, unsigned left, std::uint64_t cur) -> void {
    if (left == 0) {
      visit(cur);
      return;
    }
    for (unsigned pos = start; pos + left <= n; ++pos) {
      const unsigned orig = layout.digit(code, pos);
      for (unsigned val = 0; val < k; ++val) {
        if (val != orig) {
          self(self, pos + 1, left - 1, layout.with_digit(cur, pos, val));
        }
      }
    }
  };
  rec(rec, 0, d, code);
}

long double sphere_size(unsigned n, unsigned k, unsigned d) {
  return std::exp(log_binomial(n, d)) * std::pow(static_cast<long double>(k - 1), d);
}

}  // namespace

ClusterDecomposition cluster_decomposition(const SolutionSet& solutions, unsigned radius) {
  if (radius < 1) {
    throw ParameterError("adjacency radius must be at least 1");
  }
  ClusterDecomposition out;
  out.radius = radius;
  if (solutions.empty()) {
    out.empty = true;
    return out;
  }
  const auto& layout = solutions.layout();
  const std::size_t s = solutions.size();
  const unsigned n = variable_count(solutions.instance());
  const unsigned k = layout.domain_size();
  detail::UnionFind uf(s);

  long double ball = 0;
  for (unsigned d = 1; d <= std::min(radius, n); ++d) {
    ball += sphere_size(n, k, d);
  }
  if (ball < static_cast<long double>(s)) {
    for (std::size_t i = 0; i < s; ++i) {
      for (unsigned d = 1; d <= std::min(radius, n); ++d) {
        for_each_in_sphere(layout, solutions.code(i), d, [&](std::uint64_t nb) {
          if (auto j = solutions.find(nb)) {
            uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(*j));
          }
        });
      }
    }
  } else {
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = i + 1; j < s; ++j) {
        if (layout.hamming(solutions.code(i), solutions.code(j)) <= radius) {
          uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
      }
    }
  }

  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> id_of_root(s, kUnset);
  out.cluster_of.resize(s);
  for (std::size_t i = 0; i < s; ++i) {
    const auto r = uf.find(static_cast<std::uint32_t>(i));
    if (id_of_root[r] == kUnset) {
      id_of_root[r] = static_cast<std::uint32_t>(out.sizes.size());
      out.sizes.push_back(0);
    }
    out.cluster_of[i] = id_of_root[r];
    ++out.sizes[id_of_root[r]];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct MixedRadix {
  unsigned n;
  unsigned k;
  std::vector<std::uint64_t> stride;  // stride[i] = k^(n-1-i)

  MixedRadix(unsigned n_, unsigned k_) : n(n_), k(k_), stride(n_) {
    std::uint64_t s = 1;
    for (unsigned i = n; i-- > 0;) {
      stride[i] = s;
      s *= k;
    }
  }

  [[nodiscard]] std::uint64_t index(std::span<const std::uint8_t> values) const noexcept {
    std::uint64_t idx = 0;
    for (unsigned i = 0; i < n; ++i) {
      idx += values[i] * stride[i];
    }
    return idx;
  }

  void decode(std::uint64_t idx, std::span<std::uint8_t> out) const noexcept {
    for (unsigned i = n; i-- > 0;) {
      out[i] = static_cast<std::uint8_t>(idx % k);
      idx /= k;
    }
  }
};

}  // namespace

unsigned path_height(const Instance& inst, const Assignment& sigma, const Assignment& tau, std::uint64_t budget) {
  validate_assignment(inst, sigma);
  validate_assignment(inst, tau);
  const CompiledInstance ci(inst);
  const unsigned n = ci.variable_count();
  const unsigned k = ci.domain_size();
  const std::uint64_t total = state_space_size(n, k, budget);
  if (ci.constraint_count() >= std::numeric_limits<std::uint16_t>::max()) {
    throw ResourceError("path_height: too many constraints for the bucket queue");
  }
  const MixedRadix radix(n, k);
  const std::uint64_t source = radix.index(sigma.values);
  const std::uint64_t target = radix.index(tau.values);

  constexpr auto kUnreached = std::numeric_limits<std::uint16_t>::max();
  std::vector<std::uint16_t> best(total, kUnreached);
  std::vector<bool> done(total, false);
  std::vector<std::vector<std::uint32_t>> buckets(ci.constraint_count() + 1);

  std::vector<std::uint8_t> values(sigma.values);
  const unsigned start = ci.energy(values.data());
  best[source] = static_cast<std::uint16_t>(start);
  buckets[start].push_back(static_cast<std::uint32_t>(source));

  for (unsigned level = start; level < buckets.size(); ++level) {
    auto& bucket = buckets[level];
    while (!bucket.empty()) {
      const std::uint32_t cur = bucket.back();
      bucket.pop_back();
      if (done[cur] || best[cur] != level) {
        continue;
      }
      done[cur] = true;
      if (cur == target) {
        return level;
      }
      radix.decode(cur, values);
      const int here = static_cast<int>(ci.energy(values.data()));
      for (unsigned v = 0; v < n; ++v) {
        const std::uint8_t orig = values[v];
        for (unsigned val = 0; val < k; ++val) {
          if (val == orig) {
            continue;
          }
          const auto nb = static_cast<std::uint32_t>(cur + (static_cast<std::int64_t>(val) - orig) *
                                                               static_cast<std::int64_t>(radix.stride[v]));
          if (done[nb]) {
            continue;
          }
          const int h = here + ci.change_delta(v, static_cast<std::uint8_t>(val), values.data());
          const auto key = static_cast<std::uint16_t>(std::max<int>(static_cast<int>(level), h));
          if (key < best[nb]) {
            best[nb] = key;
            buckets[key].push_back(nb);
          }
        }
      }
    }
  }
  throw NumericError("path_height: target unreachable (internal error)");
}

std::size_t min_intercluster_distance(const SolutionSet& solutions, const ClusterDecomposition& clusters) {
  if (clusters.cluster_count() < 2) {
    throw UndefinedResultError("min_intercluster_distance needs at least two clusters");
  }
  const auto& layout = solutions.layout();
  const std::size_t s = solutions.size();
  const unsigned n = variable_count(solutions.instance());
  const unsigned k = layout.domain_size();
  const long double pairwise = 0.5L * static_cast<long double>(s) * static_cast<long double>(s);

  // Probe spheres of growing radius while that is cheaper than the pairwise scan.
  unsigned d = clusters.radius + 1;
  for (; d <= n; ++d) {
    const long double cost = static_cast<long double>(s) * sphere_size(n, k, d);
    if (cost > pairwise) {
      break;
    }
    bool hit = false;
    for (std::size_t i = 0; i < s && !hit; ++i) {
      for_each_in_sphere(layout, solutions.code(i), d, [&](std::uint64_t nb) {
        if (!hit) {
          if (auto j = solutions.find(nb); j && clusters.cluster_of[*j] != clusters.cluster_of[i]) {
            hit = true;
          }
        }
      });
    }
    if (hit) {
      return d;
    }
  }
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i + 1; j < s; ++j) {
      if (clusters.cluster_of[i] != clusters.cluster_of[j]) {
        best = std::min<std::size_t>(best, layout.hamming(solutions.code(i), solutions.code(j)));
        if (best == d) {
          return best;
        }
      }
    }
  }
  return best;
}

unsigned min_intercluster_barrier(const SolutionSet& solutions, const ClusterDecomposition& clusters,
                                  std::uint64_t budget) {
  if (clusters.cluster_count() < 2) {
    throw UndefinedResultError("min_intercluster_barrier needs at least two clusters");
  }
  const CompiledInstance ci(solutions.instance());
  const unsigned n = ci.variable_count();
  const unsigned k = ci.domain_size();
  const std::uint64_t total = state_space_size(n, k, budget);
  const MixedRadix radix(n, k);

  std::vector<std::uint32_t> energy(total);
  std::uint64_t idx = 0;
  unsigned top = 0;
  for_each_assignment(ci, budget, [&](const std::vector<std::uint8_t>&, unsigned h) {
    energy[idx++] = h;
    top = std::max(top, h);
  });
  // Counting sort of states by energy.
  std::vector<std::uint64_t> start(top + 2, 0);
  for (auto h : energy) {
    ++start[h + 1];
  }
  for (unsigned h = 0; h <= top; ++h) {
    start[h + 1] += start[h];
  }
  std::vector<std::uint32_t> order(total);
  {
    auto fill = start;
    for (std::uint64_t s = 0; s < total; ++s) {
      order[fill[energy[s]]++] = static_cast<std::uint32_t>(s);
    }
  }

  detail::UnionFind uf(total);
  std::vector<std::int32_t> label(total, -1);
  std::vector<bool> active(total, false);
  std::vector<std::uint8_t> values(n);
  for (unsigned h = 0; h <= top; ++h) {
    for (std::uint64_t p = start[h]; p < start[h + 1]; ++p) {
      const std::uint32_t s = order[p];
      active[s] = true;
      radix.decode(s, values);
      if (h == 0) {
        const auto ord = solutions.find(solutions.layout().encode(values));
        if (!ord) {
          throw ParameterError("min_intercluster_barrier: solution set is incomplete for this instance");
        }
        label[s] = static_cast<std::int32_t>(clusters.cluster_of[*ord]);
      }
      for (unsigned v = 0; v < n; ++v) {
        for (unsigned val = 0; val < k; ++val) {
          if (val == values[v]) {
            continue;
          }
          const auto nb = static_cast<std::uint32_t>(
              s + (static_cast<std::int64_t>(val) - values[v]) * static_cast<std::int64_t>(radix.stride[v]));
          if (!active[nb]) {
            continue;
          }
          const auto ra = uf.find(s);
          const auto rb = uf.find(nb);
          if (ra == rb) {
            continue;
          }
          const auto la = label[ra];
          const auto lb = label[rb];
          if (la >= 0 && lb >= 0 && la != lb) {
            return h;
          }
          const auto r = uf.unite(ra, rb);
          label[r] = la >= 0 ? la : lb;
        }
      }
    }
  }
  throw NumericError("min_intercluster_barrier: clusters never merged (internal error)");
}

}  // namespace cspgeo
