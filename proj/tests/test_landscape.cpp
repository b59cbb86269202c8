#include <doctest.h>

#include <algorithm>

#include "cspgeo/errors.hpp"
#include "cspgeo/landscape.hpp"
#include "support/oracles.hpp"

using namespace cspgeo;

namespace {

GraphInstance triangle() { return GraphInstance{3, 3, {{0, 1}, {0, 2}, {1, 2}}}; }
GraphInstance k4() { return GraphInstance{4, 3, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}}; }
Assignment make(std::vector<std::uint8_t> v, unsigned k) { return Assignment(std::move(v), k); }

}  // namespace

TEST_CASE("violation counts") {
  CHECK(violated_count(triangle(), make({0, 1, 2}, 3)) == 0);
  CHECK(violated_count(triangle(), make({0, 0, 0}, 3)) == 3);
  const CnfInstance f{3, 3, {{{0, false}, {1, false}, {2, false}}}};
  CHECK(violated_count(f, make({0, 0, 0}, 2)) == 1);
  CHECK(violated_count(f, make({1, 0, 0}, 2)) == 0);
  const HypergraphInstance h{3, 3, {{0, 1, 2}}};
  CHECK(violated_count(h, make({1, 1, 1}, 2)) == 1);
  CHECK(violated_count(h, make({1, 0, 1}, 2)) == 0);
  CHECK_THROWS_AS(violated_count(triangle(), make({0, 1}, 3)), ParameterError);
  CHECK_THROWS_AS(violated_count(triangle(), make({0, 1, 1}, 2)), ParameterError);
}

TEST_CASE("enumeration of small fixtures") {
  CHECK(enumerate_solutions(GraphInstance{3, 2, {}}).size() == 8);
  CHECK(enumerate_solutions(k4()).size() == 0);
  const auto s = enumerate_solutions(triangle());
  CHECK(s.size() == oracle::solutions(triangle()).size());
  CHECK(s.size() == 6);
}

TEST_CASE("enumeration budget is enforced") {
  CHECK_THROWS_AS(enumerate_solutions(GraphInstance{12, 3, {}}, 1000), ResourceError);
}

TEST_CASE("enumeration is sorted and agrees with the naive scan") {
  for (auto e : {Ensemble::coloring, Ensemble::sat, Ensemble::nae}) {
    for (std::uint64_t s = 0; s < 25; ++s) {
      const auto inst = oracle::random_small_instance(e, 1000 + s);
      const auto fast = enumerate_solutions(inst);
      const auto naive = oracle::solutions(inst);
      REQUIRE(fast.size() == naive.size());
      for (std::size_t i = 0; i < naive.size(); ++i) {
        CHECK(fast.assignment(i) == naive[i]);
        CHECK(fast.find(naive[i]) == i);
      }
    }
  }
}

TEST_CASE("cluster fixtures") {
  const auto cube = cluster_decomposition(enumerate_solutions(GraphInstance{3, 2, {}}));
  CHECK(cube.cluster_count() == 1);
  CHECK(cube.sizes[0] == 8);
  const auto tri = cluster_decomposition(enumerate_solutions(triangle()));
  CHECK(tri.cluster_count() == 6);
  CHECK(std::all_of(tri.sizes.begin(), tri.sizes.end(), [](auto s) { return s == 1; }));
  const auto edge = cluster_decomposition(enumerate_solutions(GraphInstance{2, 3, {{0, 1}}}));
  CHECK(edge.cluster_count() == 1);
  CHECK(edge.sizes[0] == 6);
  const auto none = cluster_decomposition(enumerate_solutions(k4()));
  CHECK(none.empty);
  CHECK(none.cluster_count() == 0);
}

TEST_CASE("clusters agree with pairwise BFS and do not depend on enumeration order") {
  for (auto e : {Ensemble::coloring, Ensemble::sat, Ensemble::nae}) {
    for (std::uint64_t s = 0; s < 15; ++s) {
      const auto inst = oracle::random_small_instance(e, 2000 + s);
      const auto sols = enumerate_solutions(inst);
      if (sols.empty() || sols.size() > 3000) {
        continue;
      }
      for (unsigned radius : {1U, 2U}) {
        const auto d = cluster_decomposition(sols, radius);
        std::vector<Assignment> naive;
        for (std::size_t i = 0; i < sols.size(); ++i) {
          naive.push_back(sols.assignment(i));
        }
        const auto labels = oracle::components(naive, radius);
        CHECK(d.cluster_of == labels);
        CHECK(d.radius == radius);

        // reversed input order gives the same partition
        std::vector<std::uint64_t> codes(sols.codes().rbegin(), sols.codes().rend());
        const SolutionSet reversed(inst, codes);
        const auto d2 = cluster_decomposition(reversed, radius);
        for (std::size_t i = 0; i < sols.size(); ++i) {
          for (std::size_t j = i + 1; j < std::min<std::size_t>(sols.size(), i + 20); ++j) {
            const auto ri = *reversed.find(sols.code(i));
            const auto rj = *reversed.find(sols.code(j));
            CHECK((d.cluster_of[i] == d.cluster_of[j]) == (d2.cluster_of[ri] == d2.cluster_of[rj]));
          }
        }
      }
    }
  }
}

TEST_CASE("path height fixtures") {
  const auto t = triangle();
  CHECK(path_height(t, make({0, 1, 2}, 3), make({1, 0, 2}, 3)) == 1);
  CHECK(path_height(t, make({0, 0, 0}, 3), make({0, 0, 0}, 3)) == 3);
  const GraphInstance edge{2, 3, {{0, 1}}};
  CHECK(path_height(edge, make({0, 1}, 3), make({2, 0}, 3)) == 0);
}

TEST_CASE("path height agrees with the level-by-level BFS and is symmetric") {
  for (auto e : {Ensemble::coloring, Ensemble::sat, Ensemble::nae}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto inst = oracle::random_small_instance(e, 3000 + s);
      Rng rng(Seed{s});
      const unsigned n = variable_count(inst), k = domain_size(inst);
      for (int rep = 0; rep < 3; ++rep) {
        Assignment a(std::vector<std::uint8_t>(n), k), b(std::vector<std::uint8_t>(n), k);
        for (unsigned v = 0; v < n; ++v) {
          a[v] = static_cast<std::uint8_t>(rng.below(k));
          b[v] = static_cast<std::uint8_t>(rng.below(k));
        }
        const auto h = path_height(inst, a, b);
        CHECK(h == oracle::path_height(inst, a, b));
        CHECK(h == path_height(inst, b, a));
        CHECK(h >= std::max(violated_count(inst, a), violated_count(inst, b)));
      }
    }
  }
}

TEST_CASE("minimum inter-cluster distance") {
  const auto s = enumerate_solutions(triangle());
  const auto d = cluster_decomposition(s);
  CHECK(min_intercluster_distance(s, d) == 2);
  CHECK(min_intercluster_barrier(s, d) == 1);
  const auto cube = enumerate_solutions(GraphInstance{3, 2, {}});
  CHECK_THROWS_AS(min_intercluster_distance(cube, cluster_decomposition(cube)), UndefinedResultError);
}

TEST_CASE("NAE solution sets are closed under complement and clusters map to clusters") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = oracle::random_small_instance(Ensemble::nae, 4000 + s);
    const auto sols = enumerate_solutions(inst);
    if (sols.empty()) {
      continue;
    }
    const auto d = cluster_decomposition(sols);
    std::vector<std::int64_t> image(d.cluster_count(), -1);
    for (std::size_t i = 0; i < sols.size(); ++i) {
      auto a = sols.assignment(i);
      for (auto& v : a.values) {
        v ^= 1;
      }
      const auto j = sols.find(a);
      REQUIRE(j.has_value());
      auto& img = image[d.cluster_of[i]];
      if (img < 0) {
        img = d.cluster_of[*j];
      }
      CHECK(img == d.cluster_of[*j]);
    }
    std::vector<std::int64_t> sorted = image;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  }
}

TEST_CASE("two solutions in different radius-1 clusters need a barrier of at least 1") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = oracle::random_small_instance(Ensemble::coloring, 5000 + s);
    const auto sols = enumerate_solutions(inst);
    if (sols.size() < 2 || sols.size() > 500) {
      continue;
    }
    const auto d = cluster_decomposition(sols);
    for (std::size_t i = 1; i < std::min<std::size_t>(sols.size(), 6); ++i) {
      const auto h = path_height(inst, sols.assignment(0), sols.assignment(i));
      CHECK((h == 0) == (d.cluster_of[0] == d.cluster_of[i]));
    }
  }
}

TEST_CASE("state space guard") {
  CHECK(state_space_size(10, 3, 59049) == 59049);
  CHECK_THROWS_AS(state_space_size(10, 3, 59048), ResourceError);
}
