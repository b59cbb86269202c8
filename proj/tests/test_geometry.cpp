#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cspgeo/errors.hpp"
#include "cspgeo/geometry.hpp"
#include "support/oracles.hpp"

using namespace cspgeo;

namespace {

GraphInstance triangle() { return GraphInstance{3, 3, {{0, 1}, {0, 2}, {1, 2}}}; }
Assignment make(std::vector<std::uint8_t> v, unsigned k) { return Assignment(std::move(v), k); }

}  // namespace

TEST_CASE("triangle shatter report") {
  const auto s = enumerate_solutions(triangle());
  const auto r = shatter_report(s, cluster_decomposition(s));
  CHECK(r.region_count == 6);
  CHECK(r.max_region_fraction == doctest::Approx(1.0 / 6));
  CHECK(r.min_interregion_distance == 2U);
  CHECK(r.min_barrier == 1U);
  CHECK(*r.min_barrier_per_n == doctest::Approx(1.0 / 3));
  CHECK(r.log_region_count_per_n == doctest::Approx(std::log(6.0) / 3));
}

TEST_CASE("single region reports no distances") {
  const auto s = enumerate_solutions(GraphInstance{3, 2, {}});
  const auto r = shatter_report(s, cluster_decomposition(s));
  CHECK(r.region_count == 1);
  CHECK_FALSE(r.min_interregion_distance.has_value());
  CHECK_FALSE(r.min_barrier.has_value());
}

TEST_CASE("unsatisfiable 3-SAT is flagged empty") {
  // density well above the k = 3 threshold
  int empty = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = gen_uniform_cnf(16, 83, 3, Seed{seed});
    const auto s = enumerate_solutions(f);
    const auto r = shatter_report(s, cluster_decomposition(s));
    CHECK(r.empty == s.empty());
    empty += r.empty ? 1 : 0;
    CHECK(r.max_region_fraction * static_cast<double>(r.region_count) >= (r.empty ? 0.0 : 1.0));
  }
  CHECK(empty >= 1);
}

TEST_CASE("classify_variables fixtures") {
  const auto free = enumerate_solutions(GraphInstance{3, 3, {}});
  const auto st = classify_variables(free, make({0, 1, 2}, 3));
  for (unsigned v = 0; v < 3; ++v) {
    CHECK(st.rigid_distance[v] == 1);
    CHECK(st.loose_radius[v] == 1);
  }
  const auto tri = enumerate_solutions(triangle());
  const auto t = classify_variables(tri, make({0, 1, 2}, 3));
  for (unsigned v = 0; v < 3; ++v) {
    CHECK(t.rigid_distance[v] == 2);
  }
  // vertex 3 is in no constraint
  const auto s4 = enumerate_solutions(GraphInstance{4, 3, {{0, 1}, {0, 2}, {1, 2}}});
  const auto t4 = classify_variables(s4, make({0, 1, 2, 0}, 3));
  CHECK(t4.rigid_distance[3] == 1);
  CHECK_THROWS_AS(classify_variables(tri, make({0, 0, 1}, 3)), ParameterError);
}

TEST_CASE("classify_variables agrees with the direct scan") {
  for (auto e : {Ensemble::coloring, Ensemble::sat, Ensemble::nae}) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto inst = oracle::random_small_instance(e, 6000 + s);
      const auto sols = enumerate_solutions(inst);
      if (sols.empty()) {
        continue;
      }
      std::vector<Assignment> all;
      for (std::size_t i = 0; i < sols.size(); ++i) {
        all.push_back(sols.assignment(i));
      }
      const auto sigma = all[s % all.size()];
      const auto st = classify_variables(sols, sigma);
      const auto naive = oracle::classify(all, sigma);
      CHECK(st.rigid_distance == naive.rigid);
      CHECK(st.loose_radius == naive.loose);
      for (std::size_t v = 0; v < sigma.size(); ++v) {
        // the changed-value witnesses realize the rigid distance
        std::uint32_t best = kUnbounded;
        for (unsigned j = 0; j < sigma.domain_size; ++j) {
          if (j != sigma[v]) {
            best = std::min(best, st.witness[v][j]);
          }
        }
        CHECK(best == st.rigid_distance[v]);
        CHECK(st.rigid_distance[v] >= 1);
        // rigid distance >= 2 iff no unit move of v stays a solution
        bool unit_move = false;
        for (unsigned j = 0; j < sigma.domain_size; ++j) {
          if (j == sigma[v]) {
            continue;
          }
          auto t = sigma;
          t[v] = static_cast<std::uint8_t>(j);
          unit_move = unit_move || oracle::violations(inst, t) == 0;
        }
        CHECK((st.rigid_distance[v] >= 2) == !unit_move);
      }
    }
  }
}

TEST_CASE("overlap matrix fixtures") {
  const auto m = overlap_matrix(make({0, 0, 1, 1}, 2), make({0, 1, 0, 1}, 2), 2);
  for (unsigned i = 0; i < 2; ++i) {
    for (unsigned j = 0; j < 2; ++j) {
      CHECK(m(i, j) == 0.25);
    }
  }
  CHECK(frobenius_overlap(m) == 0.25);
  const auto sigma = make({0, 1, 2, 0, 1, 2}, 3);
  const auto d = overlap_matrix(sigma, sigma, 3);
  CHECK(frobenius_overlap(d) == doctest::Approx(1.0 / 3));
  for (unsigned i = 0; i < 3; ++i) {
    double row = 0;
    for (unsigned j = 0; j < 3; ++j) {
      row += d(i, j);
    }
    CHECK(row == doctest::Approx(1.0 / 3));
  }
  // all entries 1/k^2
  const auto u = overlap_matrix(make({0, 0, 0, 1, 1, 1, 2, 2, 2}, 3), make({0, 1, 2, 0, 1, 2, 0, 1, 2}, 3), 3);
  CHECK(frobenius_overlap(u) == doctest::Approx(1.0 / 9));
  CHECK_THROWS_AS(overlap_matrix(make({0, 1}, 2), make({0}, 2), 2), ParameterError);
}

TEST_CASE("overlap is invariant under joint relabeling and permutation-stable under relabeling tau") {
  Rng rng(Seed{17});
  for (unsigned k = 2; k <= 4; ++k) {
    const unsigned n = 9;
    Assignment s(std::vector<std::uint8_t>(n), k), t(std::vector<std::uint8_t>(n), k);
    for (unsigned v = 0; v < n; ++v) {
      s[v] = static_cast<std::uint8_t>(rng.below(k));
      t[v] = static_cast<std::uint8_t>(rng.below(k));
    }
    const auto base = overlap_matrix(s, t, k).scaled_frobenius();
    std::vector<unsigned> perm(k);
    std::iota(perm.begin(), perm.end(), 0U);
    std::vector<std::uint64_t> values, values_again;
    do {
      auto s2 = s, t2 = t;
      for (unsigned v = 0; v < n; ++v) {
        s2[v] = static_cast<std::uint8_t>(perm[s[v]]);
        t2[v] = static_cast<std::uint8_t>(perm[t[v]]);
      }
      CHECK(overlap_matrix(s2, t2, k).scaled_frobenius() == base);
      values.push_back(overlap_matrix(s, t2, k).scaled_frobenius());
      values_again.push_back(overlap_matrix(s2, t, k).scaled_frobenius());
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::sort(values.begin(), values.end());
    std::sort(values_again.begin(), values_again.end());
    CHECK(values == values_again);
  }
}

TEST_CASE("overlap changes by at most 4/n per unit step") {
  Rng rng(Seed{23});
  const unsigned n = 12, k = 3;
  for (int rep = 0; rep < 200; ++rep) {
    Assignment s(std::vector<std::uint8_t>(n), k), t(std::vector<std::uint8_t>(n), k);
    for (unsigned v = 0; v < n; ++v) {
      s[v] = static_cast<std::uint8_t>(rng.below(k));
      t[v] = static_cast<std::uint8_t>(rng.below(k));
    }
    auto t2 = t;
    const auto v = rng.below(n);
    t2[v] = static_cast<std::uint8_t>((t[v] + 1 + rng.below(k - 1)) % k);
    const auto a = static_cast<std::int64_t>(overlap_matrix(s, t, k).scaled_frobenius());
    const auto b = static_cast<std::int64_t>(overlap_matrix(s, t2, k).scaled_frobenius());
    // |f - f'| <= 4/n  <=>  |n^2 f - n^2 f'| <= 4n
    CHECK(std::abs(a - b) <= 4 * static_cast<std::int64_t>(n));
  }
}

TEST_CASE("overlap histogram fixtures") {
  const GraphInstance empty{2, 2, {}};
  const auto h = overlap_histogram(empty, make({0, 0}, 2), 0.0);
  // keys are n^2 f: f = 1 -> 4, f = 1/2 -> 2
  CHECK(h.counts.size() == 2);
  CHECK(h.counts.at(4) == 2);
  CHECK(h.counts.at(2) == 2);
  const auto tri = triangle();
  CHECK(overlap_histogram(tri, make({0, 1, 2}, 3), 1.0).total() == 27);
}

TEST_CASE("overlap histogram agrees with the naive scan and grows with lambda") {
  for (auto e : {Ensemble::coloring, Ensemble::sat, Ensemble::nae}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto inst = oracle::random_small_instance(e, 7000 + s);
      const unsigned n = variable_count(inst), k = domain_size(inst);
      Rng rng(Seed{s});
      Assignment sigma(std::vector<std::uint8_t>(n), k);
      for (unsigned v = 0; v < n; ++v) {
        sigma[v] = static_cast<std::uint8_t>(rng.below(k));
      }
      std::uint64_t prev = 0;
      for (double lambda : {0.0, 0.1, 0.25, 0.5}) {
        const auto h = overlap_histogram(inst, sigma, lambda);
        const auto allowed = static_cast<unsigned>(std::floor(lambda * n));
        CHECK(h.max_violations == allowed);
        CHECK(h.counts == oracle::histogram(inst, sigma, allowed));
        CHECK(h.total() >= prev);
        prev = h.total();
      }
    }
  }
}

TEST_CASE("empty band and overlap peeling") {
  OverlapHistogram h;
  h.n = 4;
  h.counts = {{4, 1}, {6, 3}, {12, 2}, {16, 1}};
  const auto band = widest_empty_band(h, 4, 16);
  REQUIRE(band.has_value());
  CHECK(band->low_key == 6);
  CHECK(band->high_key == 12);
  const auto s = enumerate_solutions(triangle());
  const auto regions = peel_overlap_regions(s, 0.5);
  CHECK(std::set<std::uint32_t>(regions.begin(), regions.end()).size() == 6);
}
