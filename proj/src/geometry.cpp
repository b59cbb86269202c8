#include "cspgeo/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "cspgeo/errors.hpp"

namespace cspgeo {

ShatterReport shatter_report(const SolutionSet& solutions, const ClusterDecomposition& clusters,
                             std::uint64_t barrier_budget) {
  ShatterReport r;
  r.adjacency_radius = clusters.radius;
  if (solutions.empty() || clusters.empty) {
    r.empty = true;
    return r;
  }
  if (clusters.cluster_of.size() != solutions.size()) {
    throw ParameterError("shatter_report: decomposition does not match solution set");
  }
  const double n = variable_count(solutions.instance());
  r.solution_count = solutions.size();
  r.region_count = clusters.cluster_count();
  r.log_region_count_per_n = std::log(static_cast<double>(r.region_count)) / n;
  const auto largest = *std::max_element(clusters.sizes.begin(), clusters.sizes.end());
  r.max_region_fraction = static_cast<double>(largest) / static_cast<double>(solutions.size());
  if (r.region_count >= 2) {
    r.min_interregion_distance = min_intercluster_distance(solutions, clusters);
    r.min_interregion_distance_per_n = static_cast<double>(*r.min_interregion_distance) / n;
    r.min_barrier = min_intercluster_barrier(solutions, clusters, barrier_budget);
    r.min_barrier_per_n = static_cast<double>(*r.min_barrier) / n;
  }
  return r;
}

VariableStatus classify_variables(const SolutionSet& solutions, const Assignment& sigma) {
  if (!solutions.find(sigma)) {
    throw ParameterError("classify_variables: sigma is not a solution");
  }
  const unsigned n = variable_count(solutions.instance());
  const unsigned k = solutions.layout().domain_size();
  VariableStatus st;
  st.rigid_distance.assign(n, kUnbounded);
  st.loose_radius.assign(n, kUnbounded);
  st.witness.assign(n, std::vector<std::uint32_t>(k, kUnbounded));
  std::vector<std::uint8_t> tau(n);
  for (std::size_t t = 0; t < solutions.size(); ++t) {
    solutions.layout().decode(solutions.code(t), tau);
    std::uint32_t d = 0;
    for (unsigned v = 0; v < n; ++v) {
      d += tau[v] != sigma[v] ? 1U : 0U;
    }
    for (unsigned v = 0; v < n; ++v) {
      auto& w = st.witness[v][tau[v]];
      w = std::min(w, d);
      if (tau[v] != sigma[v]) {
        st.rigid_distance[v] = std::min(st.rigid_distance[v], d);
      }
    }
  }
  for (unsigned v = 0; v < n; ++v) {
    st.loose_radius[v] = *std::max_element(st.witness[v].begin(), st.witness[v].end());
  }
  return st;
}

std::uint64_t OverlapMatrix::scaled_frobenius() const noexcept {
  std::uint64_t s = 0;
  for (auto c : counts) {
    s += c * c;
  }
  return s;
}

OverlapMatrix overlap_matrix(const Assignment& sigma, const Assignment& tau, unsigned k) {
  if (sigma.size() != tau.size()) {
    throw ParameterError("overlap_matrix: length mismatch");
  }
  if (sigma.size() == 0) {
    throw ParameterError("overlap_matrix: empty assignments");
  }
  OverlapMatrix m;
  m.k = k;
  m.n = static_cast<unsigned>(sigma.size());
  m.counts.assign(static_cast<std::size_t>(k) * k, 0);
  for (std::size_t v = 0; v < sigma.size(); ++v) {
    if (sigma[v] >= k || tau[v] >= k) {
      throw ParameterError("overlap_matrix: value outside [k]");
    }
    ++m.counts[sigma[v] * k + tau[v]];
  }
  return m;
}

double frobenius_overlap(const OverlapMatrix& m) {
  return static_cast<double>(m.scaled_frobenius()) / (static_cast<double>(m.n) * m.n);
}

std::uint64_t OverlapHistogram::total() const noexcept {
  std::uint64_t t = 0;
  for (const auto& [key, c] : counts) {
    t += c;
  }
  return t;
}

OverlapHistogram overlap_histogram(const Instance& inst, const Assignment& sigma, double lambda,
                                   std::uint64_t budget) {
  validate_assignment(inst, sigma);
  if (!(lambda >= 0.0)) {
    throw ParameterError("overlap_histogram: lambda must be non-negative");
  }
  const CompiledInstance ci(inst);
  const unsigned n = ci.variable_count();
  const unsigned k = ci.domain_size();
  OverlapHistogram h;
  h.n = n;
  h.max_violations = static_cast<unsigned>(std::floor(lambda * n));
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(k) * k);
  for_each_assignment(ci, budget, [&](const std::vector<std::uint8_t>& tau, unsigned energy) {
    if (energy > h.max_violations) {
      return;
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (unsigned v = 0; v < n; ++v) {
      ++counts[sigma[v] * k + tau[v]];
    }
    std::uint64_t key = 0;
    for (auto c : counts) {
      key += c * c;
    }
    ++h.counts[key];
  });
  return h;
}

std::optional<EmptyBand> widest_empty_band(const OverlapHistogram& h, std::uint64_t floor_key,
                                           std::uint64_t ceil_key) {
  std::optional<EmptyBand> best;
  std::uint64_t prev = floor_key;
  auto consider = [&](std::uint64_t next) {
    if (next > prev + 1 && (!best || next - prev > best->high_key - best->low_key)) {
      best = EmptyBand{prev, next};
    }
  };
  for (auto it = h.counts.upper_bound(floor_key); it != h.counts.end() && it->first < ceil_key; ++it) {
    consider(it->first);
    prev = it->first;
  }
  consider(ceil_key);
  return best;
}

std::vector<std::uint32_t> peel_overlap_regions(const SolutionSet& solutions, double y2) {
  constexpr auto kUnassigned = std::numeric_limits<std::uint32_t>::max();
  const unsigned n = variable_count(solutions.instance());
  const unsigned k = solutions.layout().domain_size();
  std::vector<std::uint32_t> region(solutions.size(), kUnassigned);
  const double threshold = y2 * static_cast<double>(n) * n;
  std::vector<std::uint8_t> a(n);
  std::vector<std::uint8_t> b(n);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(k) * k);
  std::uint32_t next = 0;
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    if (region[s] != kUnassigned) {
      continue;
    }
    // sigma always joins its own region, even when f_sigma(sigma) <= y2.
    region[s] = next;
    solutions.layout().decode(solutions.code(s), a);
    for (std::size_t t = s + 1; t < solutions.size(); ++t) {
      if (region[t] != kUnassigned) {
        continue;
      }
      solutions.layout().decode(solutions.code(t), b);
      std::fill(counts.begin(), counts.end(), 0);
      for (unsigned v = 0; v < n; ++v) {
        ++counts[a[v] * k + b[v]];
      }
      std::uint64_t key = 0;
      for (auto c : counts) {
        key += c * c;
      }
      if (static_cast<double>(key) > threshold) {
        region[t] = next;
      }
    }
    ++next;
  }
  return region;
}

}  // namespace cspgeo
