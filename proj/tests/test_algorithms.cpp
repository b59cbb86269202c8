#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cspgeo/algorithms.hpp"
#include "cspgeo/errors.hpp"
#include "support/oracles.hpp"

using namespace cspgeo;

TEST_CASE("unit clause on a single clause always succeeds") {
  const CnfInstance f{5, 3, {{{0, false}, {2, true}, {4, false}}}};
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto o = unit_clause_solve(f, Seed{s});
    REQUIRE(o.success);
    CHECK(oracle::violations(f, *o.assignment) == 0);
  }
}

TEST_CASE("contradictory unit clauses fail within two steps") {
  const CnfInstance f{1, 1, {{{0, false}}, {{0, true}}}};
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto o = unit_clause_solve(f, Seed{s});
    CHECK_FALSE(o.success);
    REQUIRE(o.failure.has_value());
    CHECK(o.failure->step <= 2);
  }
}

TEST_CASE("consistent unit formulas are always solved") {
  Rng rng(Seed{4});
  for (int rep = 0; rep < 20; ++rep) {
    CnfInstance f{12, 1, {}};
    for (std::uint32_t v = 0; v < 12; ++v) {
      if (rng.coin()) {
        f.clauses.push_back({{v, rng.coin()}});
      }
    }
    const auto o = unit_clause_solve(f, Seed{static_cast<std::uint64_t>(rep)});
    REQUIRE(o.success);
    CHECK(oracle::violations(f, *o.assignment) == 0);
    CHECK(o.forced_steps == f.clauses.size());
  }
}

TEST_CASE("heuristics are deterministic given the seed and successes are solutions") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto f = gen_uniform_cnf(200, 600, 3, Seed{s});
    const auto a = unit_clause_solve(f, Seed{s + 1});
    const auto b = unit_clause_solve(f, Seed{s + 1});
    CHECK(a.success == b.success);
    CHECK(a.steps == b.steps);
    if (a.success) {
      CHECK(*a.assignment == *b.assignment);
      CHECK(oracle::violations(f, *a.assignment) == 0);
    }
    CHECK(a.steps <= f.n);
    const auto g = gen_uniform_graph(200, 400, 4, Seed{s});
    const auto c = greedy_color(g, Seed{s});
    const auto d = greedy_color(g, Seed{s});
    CHECK(c.success == d.success);
    if (c.success) {
      CHECK(*c.assignment == *d.assignment);
      CHECK(oracle::violations(g, *c.assignment) == 0);
    }
  }
}

TEST_CASE("greedy coloring fixtures") {
  const GraphInstance empty{7, 2, {}};
  const GraphInstance k3{3, 3, {{0, 1}, {0, 2}, {1, 2}}};
  const GraphInstance k4{4, 3, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  for (std::uint64_t s = 0; s < 100; ++s) {
    CHECK(greedy_color(empty, Seed{s}).success);
    CHECK(greedy_color(k3, Seed{s}).success);
    const auto o = greedy_color(k4, Seed{s});
    CHECK_FALSE(o.success);
    CHECK(o.failure.has_value());
  }
  CHECK_THROWS_AS(greedy_color(GraphInstance{3, 65, {}}, Seed{1}), ParameterError);
}

TEST_CASE("unit clause success rate does not increase with density") {
  const std::vector<double> grid{1.0, 2.0, 3.0, 3.5};
  const auto rows = density_sweep({Ensemble::sat, 2000, 3}, grid, 500, Seed{9}, 0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].rate() <= rows[i - 1].rate());
  }
  for (const auto& r : rows) {
    MESSAGE("r=" << r.density << " rate=" << r.rate());
  }
}

TEST_CASE("greedy coloring fails more often at higher average degree") {
  const double base = 5 * std::log(5.0);
  const std::vector<double> grid{0.5 * base, 0.8 * base, 1.1 * base, 1.4 * base};
  const auto rows = density_sweep({Ensemble::coloring, 3000, 5}, grid, 60, Seed{10}, 0);
  CHECK(rows.front().rate() > rows.back().rate());
}

TEST_CASE("sweep edge cases") {
  const auto sat = density_sweep({Ensemble::sat, 50, 3}, {0.0}, 1, Seed{1});
  CHECK(sat[0].rate() == 1.0);
  const auto col = density_sweep({Ensemble::coloring, 50, 3}, {0.0}, 5, Seed{1});
  CHECK(col[0].rate() == 1.0);
  CHECK(col[0].m == 0);
  CHECK_THROWS_AS(density_sweep({Ensemble::sat, 50, 3}, {}, 1, Seed{1}), ParameterError);
  CHECK_THROWS_AS(density_sweep({Ensemble::sat, 50, 3}, {1.0}, 0, Seed{1}), ParameterError);
  CHECK_THROWS_AS(density_sweep({Ensemble::nae, 50, 3}, {1.0}, 1, Seed{1}), ParameterError);
}

TEST_CASE("sweeps do not depend on the thread count") {
  const std::vector<double> grid{1.0, 3.0};
  const auto a = density_sweep({Ensemble::sat, 300, 3}, grid, 40, Seed{5}, 1);
  const auto b = density_sweep({Ensemble::sat, 300, 3}, grid, 40, Seed{5}, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].successes == b[i].successes);
  }
}

TEST_CASE("Wilson interval") {
  const auto i = wilson_interval(50, 100);
  CHECK(i.low == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(i.high == doctest::Approx(0.5962).epsilon(1e-3));
  CHECK(wilson_interval(0, 10).low == 0.0);
  CHECK(wilson_interval(10, 10).high == doctest::Approx(1.0));
}

TEST_CASE("density conventions and sweep CSV") {
  CHECK(constraints_for_density(Ensemble::coloring, 10, 3.0) == 15);
  CHECK(constraints_for_density(Ensemble::sat, 10, 4.2) == 42);
  std::ostringstream out;
  write_sweep_csv(out, density_sweep({Ensemble::sat, 20, 3}, {1.0}, 2, Seed{1}));
  CHECK(out.str().rfind("ensemble,n,k,density,trials,successes,ci_low,ci_high\n", 0) == 0);
}
