#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "cspgeo/combinatorics.hpp"
#include "cspgeo/errors.hpp"
#include "cspgeo/landscape.hpp"
#include "cspgeo/moments.hpp"
#include "support/oracles.hpp"
#include "support/stats.hpp"

using namespace cspgeo;

namespace {

double xi(unsigned k, double r) { return std::log(k) + r * std::log1p(-1.0 / k); }

/// E|S| over every instance with m distinct constraints, by brute force.
double brute_force_expectation(Ensemble e, unsigned n, unsigned m, unsigned k) {
  const auto universe = universe_size(e, n, k);
  std::vector<std::uint32_t> pick(m);
  const auto count = *binomial_exact(universe, m);
  double total = 0;
  for (std::uint64_t r = 0; r < count; ++r) {
    unrank_combination(r, static_cast<unsigned>(universe), m, pick);
    std::vector<std::uint64_t> idx(pick.begin(), pick.end());
    total += static_cast<double>(oracle::solutions(instance_from_universe(e, n, k, idx)).size());
  }
  return total / static_cast<double>(count);
}

}  // namespace

TEST_CASE("coloring first moment") {
  CHECK(expected_solutions_coloring(9, 0, 4).log_value == 9 * std::log(4.0L));
  CHECK(static_cast<double>(expected_solutions_coloring(2, 1, 2).log_value) == doctest::Approx(std::log(2.0)));
  for (auto [n, m, k] : {std::tuple{4U, 2U, 3U}, std::tuple{5U, 4U, 2U}, std::tuple{5U, 3U, 3U}}) {
    const double exact = std::exp(static_cast<double>(expected_solutions_coloring(n, m, k).log_value));
    CHECK(exact == doctest::Approx(brute_force_expectation(Ensemble::coloring, n, m, k)).epsilon(1e-12));
  }
  const auto fm = expected_solutions_coloring(100, 300, 5);
  CHECK(static_cast<double>(fm.log_asymptotic) == doctest::Approx(100 * std::log(5.0) + 300 * std::log(0.8)));
}

TEST_CASE("coloring first moment matches the Monte Carlo mean at n=12, k=3, m=18") {
  std::vector<double> counts;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    counts.push_back(static_cast<double>(enumerate_solutions(gen_uniform_graph(12, 18, 3, Seed{s})).size()));
  }
  const auto me = stats::mean_and_error(counts);
  const double exact = std::exp(static_cast<double>(expected_solutions_coloring(12, 18, 3).log_value));
  MESSAGE("exact " << exact << " vs mean " << me.mean << " +- " << me.stderr_);
  CHECK(std::fabs(exact - me.mean) < 3 * me.stderr_);
}

TEST_CASE("SAT first moment") {
  CHECK(expected_solutions_sat(11, 0, 3, true) == 11 * std::log(2.0L));
  CHECK(expected_solutions_sat(11, 0, 3, false) == 11 * std::log(2.0L));
  // saturated: every sign pattern present, so every assignment is excluded
  CHECK(std::isinf(static_cast<double>(expected_solutions_sat(3, 8, 3, true))));
  CHECK(oracle::solutions(gen_uniform_cnf(3, 8, 3, Seed{1})).empty());
  const double mu = static_cast<double>(expected_solutions_sat(10, 20, 3, false));
  const double ex = static_cast<double>(expected_solutions_sat(10, 20, 3, true));
  CHECK(std::fabs(mu - ex) / std::fabs(ex) < 0.01);
  CHECK(std::exp(static_cast<double>(expected_solutions_sat(5, 3, 3, true))) ==
        doctest::Approx(brute_force_expectation(Ensemble::sat, 5, 3, 3)).epsilon(1e-12));
}

TEST_CASE("NAE first moment against brute force") {
  CHECK(std::exp(static_cast<double>(expected_solutions_nae(5, 2, 3))) ==
        doctest::Approx(brute_force_expectation(Ensemble::nae, 5, 2, 3)).epsilon(1e-12));
  CHECK(expected_solutions_nae(7, 0, 3) == 7 * std::log(2.0L));
}

TEST_CASE("moments stay finite in the log domain at large sizes") {
  CHECK(std::isfinite(static_cast<double>(expected_solutions_coloring(400, 1000000 / 20, 5).log_value)));
  CHECK(std::isfinite(static_cast<double>(expected_solutions_sat(10000, 1000000, 5, true))));
  CHECK(std::isfinite(static_cast<double>(expected_solutions_nae(10000, 1000000, 5))));
}

TEST_CASE("exact SAT moment approaches the independent-clause value when clauses rarely collide") {
  // C(1000, 8) 2^8 is about 6e21 clauses, so distinctness barely matters
  for (std::uint64_t m : {50000ULL, 180000ULL}) {
    const auto exact = static_cast<double>(expected_solutions_sat(1000, m, 8, true));
    const auto indep = static_cast<double>(expected_solutions_sat(1000, m, 8, false));
    CHECK(exact == doctest::Approx(indep).epsilon(1e-9));
  }
  // NAE: sum over class sizes c of C(n, c) p_c^m, with the monochromatic fraction of
  // c-sets as a plain product
  const unsigned n = 1000, k = 8;
  const double m = 40000;
  auto mono = [&](unsigned c) {
    double f = 1;
    for (unsigned i = 0; i < k; ++i) {
      f *= c >= i ? static_cast<double>(c - i) / (n - i) : 0.0;
    }
    return f;
  };
  double top = -INFINITY;
  std::vector<double> terms;
  for (unsigned c = 0; c <= n; ++c) {
    const double t = std::lgamma(n + 1.0) - std::lgamma(c + 1.0) - std::lgamma(n - c + 1.0) +
                     m * std::log1p(-mono(c) - mono(n - c));
    terms.push_back(t);
    top = std::max(top, t);
  }
  double sum = 0;
  for (double t : terms) {
    sum += std::exp(t - top);
  }
  const double nae = static_cast<double>(expected_solutions_nae(n, 40000, k));
  CHECK(nae == doctest::Approx(top + std::log(sum)).epsilon(1e-9));
}

TEST_CASE("eps root") {
  CHECK(solve_eps(2) == 1.0);
  for (unsigned k = 3; k <= 30; ++k) {
    const double e = solve_eps(k);
    const double lo = std::ldexp(1.0, 1 - static_cast<int>(k)) + k * std::ldexp(1.0, -2 * static_cast<int>(k));
    const double hi = std::ldexp(1.0, 1 - static_cast<int>(k)) + 3 * k * std::ldexp(1.0, -2 * static_cast<int>(k));
    CHECK(lo < e);
    CHECK(e < hi);
    CHECK(std::fabs(e * std::pow(2 - e, k - 1) - 1) < 1e-12);
  }
  CHECK_THROWS_AS(solve_eps(1), ParameterError);
}

TEST_CASE("Lambda_b") {
  CHECK(lambda_b(8, 0.0).value == 4.0L);
  const auto l = lambda_b(10, 600);
  const double rhs = std::log(2.0) + 600 * (std::log1p(-std::ldexp(1.0, -10)) - 10 * std::ldexp(1.0, 3 - 20));
  CHECK(static_cast<double>(l.rate) >= rhs);
  double prev = INFINITY;
  for (double r : linear_grid(0, 256 * std::log(2.0), 200)) {
    const double v = static_cast<double>(lambda_b(8, r).log_value);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK_THROWS_AS(lambda_b(2, 1.0), UndefinedResultError);
}

TEST_CASE("pair exponent endpoints") {
  const double r = 4.2;
  CHECK(sat_pair_exponent(3, r, 0) == doctest::Approx(r * std::log(1 - 0.125)));
  CHECK(sat_pair_exponent(3, r, 1) == doctest::Approx(r * std::log(1 - 0.25)));
  CHECK_THROWS_AS(sat_pair_exponent(3, r, 1.5), ParameterError);
}

TEST_CASE("pair exponent against Monte Carlo at n=10, k=3, m=15") {
  // tau at distance 0 and n from sigma; the per-clause law is then exact, so the
  // exponent must match the empirical joint satisfaction rate.
  const unsigned n = 10, k = 3, m = 15;
  const Assignment sigma(std::vector<std::uint8_t>{0, 1, 1, 0, 1, 0, 0, 1, 1, 0}, 2);
  for (unsigned d : {0U, n}) {
    Assignment tau = sigma;
    for (unsigned v = 0; v < d; ++v) {
      tau[v] ^= 1;
    }
    const int samples = 100000;
    int both = 0;
    for (int s = 0; s < samples; ++s) {
      const auto f = gen_uniform_cnf(n, m, k, derive_seed(Seed{321}, s));
      both += oracle::violations(f, sigma) == 0 && oracle::violations(f, tau) == 0 ? 1 : 0;
    }
    const double p = static_cast<double>(both) / samples;
    const double se = std::sqrt((1 - p) / (p * samples));  // of ln p
    const double predicted = n * sat_pair_exponent(k, static_cast<double>(m) / n, static_cast<double>(d) / n);
    MESSAGE("d=" << d << " ln p=" << std::log(p) << " predicted " << predicted << " se " << se);
    CHECK(std::fabs(std::log(p) - predicted) < 3 * se);
  }
}

TEST_CASE("overlap exponent at zero density is the binary entropy") {
  for (double a : {0.1, 0.3, 0.5, 0.9}) {
    CHECK(sat_overlap_exponent(5, 0, a) == doctest::Approx(-a * std::log(a) - (1 - a) * std::log(1 - a)));
  }
  CHECK_THROWS_AS(sat_overlap_exponent(5, 1, 0.0), UndefinedResultError);
  CHECK_THROWS_AS(sat_overlap_exponent(5, 1, 1.0), UndefinedResultError);
}

TEST_CASE("overlap exponent at alpha* is below -k 2^(3-k) for k=10") {
  const unsigned k = 10;
  const double r = 0.9 * (std::ldexp(1.0, k) * std::log(2.0) - k);
  const double value = sat_overlap_exponent(k, r, sat_alpha_star(k));
  const double bound = -static_cast<double>(k) * std::ldexp(1.0, 3 - static_cast<int>(k));
  MESSAGE("value " << value << " bound " << bound);
  CHECK(value < bound);
}

TEST_CASE("overlap exponent is Lipschitz on [0.01, 0.33]") {
  for (unsigned k : {3U, 5U, 10U}) {
    const double r = 0.5 * std::ldexp(1.0, k) * std::log(2.0);
    const double lip = sat_overlap_lipschitz(k, r, 0.01);
    const auto grid = linear_grid(0.01, 0.33, 2001);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double diff = std::fabs(sat_overlap_exponent(k, r, grid[i]) - sat_overlap_exponent(k, r, grid[i - 1]));
      CHECK(diff <= lip * (grid[i] - grid[i - 1]) * (1 + 1e-9));
    }
  }
}

TEST_CASE("coloring exponent at the uniform and diagonal matrices") {
  const unsigned k = 5;
  const double r = 3;
  CHECK(coloring_overlap_exponent(std::vector<double>(k * k, 1.0 / (k * k)), k, r) == doctest::Approx(xi(k, r)));
  CHECK(coloring_overlap_exponent(make_ansatz(k, 0).matrix(), k, r) == doctest::Approx(0.0));
  CHECK(coloring_overlap_exponent(make_ansatz(k, 0).matrix(), k, r, 0.25) == doctest::Approx(0.25));
  std::vector<double> bad(k * k, 0.05);
  CHECK_THROWS_AS(coloring_overlap_exponent(bad, k, r), ParameterError);
}

TEST_CASE("coloring exponent at the ansatz h = k^-3/2 is negative for k=50") {
  const unsigned k = 50;
  const double r = 0.6 * k * std::log(k);
  const double value = coloring_overlap_exponent(make_ansatz(k, std::pow(k, -1.5)).matrix(), k, r);
  MESSAGE("ansatz value " << value);
  CHECK(value < 0);
}

TEST_CASE("ansatz geometry") {
  const auto a = make_ansatz(6, 0.05);
  const auto mtx = a.matrix();
  for (unsigned j = 0; j < 6; ++j) {
    double col = 0;
    for (unsigned i = 0; i < 6; ++i) {
      col += mtx[i * 6 + j];
    }
    CHECK(col == doctest::Approx(1.0 / 6));
  }
  const auto b = ansatz_for_overlap(6, a.frobenius());
  CHECK(b.h == doctest::Approx(0.05));
  CHECK_THROWS_AS(make_ansatz(6, 0.2), ParameterError);
}

TEST_CASE("optimizer dominates the ansatz and is forced at x = 1/k^2") {
  for (unsigned k : {3U, 4U, 6U}) {
    const double r = k * std::log(k);
    for (double frac : {0.3, 0.6, 0.9}) {
      const double x = 1.0 / (k * k) + frac * (1.0 / k - 1.0 / (k * k));
      const auto res = maximize_coloring_exponent(k, r, x);
      CHECK(res.value >= res.ansatz_value - 1e-12);
      double sq = 0;
      for (double v : res.matrix) {
        sq += v * v;
        CHECK(v >= 0);
      }
      CHECK(sq == doctest::Approx(x).epsilon(1e-9));
    }
    const auto u = maximize_coloring_exponent(k, r, 1.0 / (k * k));
    CHECK(u.value == doctest::Approx(xi(k, r)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(maximize_coloring_exponent(4, 1, 0.25), ParameterError);
  CHECK_THROWS_AS(maximize_coloring_exponent(4, 1, 0.01), ParameterError);
}

TEST_CASE("optimizer matches a grid search over the symmetric family at k=4, x=0.8/k") {
  // Symmetric circulant matrices with entries c0 (diagonal), c1 (cyclic distance 1 or 3)
  // and c2 (distance 2). The column sums fix c2 = 1/4 - c0 - 2 c1, leaving the two
  // parameters (c0, c1); Frobenius norm x cuts out an ellipse, scanned by angle and then
  // refined by golden-section search around the best grid point.
  const unsigned k = 4;
  const double x = 0.8 / k, r = k * std::log(k);
  auto matrix = [&](double c0, double c1) {
    const double c2 = 0.25 - c0 - 2 * c1;
    std::vector<double> a(16);
    for (unsigned i = 0; i < 4; ++i) {
      for (unsigned j = 0; j < 4; ++j) {
        const unsigned d = (j + 4 - i) % 4;
        a[i * 4 + j] = d == 0 ? c0 : d == 2 ? c2 : c1;
      }
    }
    return a;
  };
  // With u = c0 - 1/16 and w = c1 - 1/16 the constraint sum a^2 = x reads
  // 4 [u^2 + 2 w^2 + (u + 2 w)^2] = x - 1/16, i.e. 8u^2 + 16uw + 24w^2 = x - 1/16.
  // Diagonalize the quadratic form and walk its ellipse.
  const double rhs = x - 1.0 / 16;
  const double q11 = 8, q12 = 8, q22 = 24;
  const double tr = q11 + q22, det = q11 * q22 - q12 * q12;
  const double l1 = tr / 2 + std::sqrt(tr * tr / 4 - det), l2 = tr / 2 - std::sqrt(tr * tr / 4 - det);
  const double th = 0.5 * std::atan2(2 * q12, q11 - q22);
  auto point = [&](double phi, double& c0, double& c1) {
    const double p = std::sqrt(rhs / l1) * std::cos(phi), q = std::sqrt(rhs / l2) * std::sin(phi);
    c0 = 1.0 / 16 + std::cos(th) * p - std::sin(th) * q;
    c1 = 1.0 / 16 + std::sin(th) * p + std::cos(th) * q;
  };
  auto value = [&](double phi) {
    double c0, c1;
    point(phi, c0, c1);
    const double c2 = 0.25 - c0 - 2 * c1;
    if (c0 < 0 || c1 < 0 || c2 < 0) {
      return -std::numeric_limits<double>::infinity();
    }
    return coloring_overlap_exponent(matrix(c0, c1), k, r);
  };
  const int steps = 200000;
  double best = -std::numeric_limits<double>::infinity(), best_phi = 0;
  for (int i = 0; i < steps; ++i) {
    const double phi = 2 * M_PI * i / steps;
    const double v = value(phi);
    if (v > best) {
      best = v;
      best_phi = phi;
    }
  }
  double lo = best_phi - 2 * M_PI / steps, hi = best_phi + 2 * M_PI / steps;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    (value(a) < value(b) ? lo : hi) = value(a) < value(b) ? a : b;
  }
  best = std::max(best, value((lo + hi) / 2));
  const auto res = maximize_coloring_exponent(k, r, x);
  MESSAGE("optimizer " << res.value << " grid " << best);
  CHECK(std::fabs(res.value - best) < 1e-6);
}

TEST_CASE("upper bound check") {
  const auto u0 = upper_bound_check(30, 0.0);
  CHECK(u0.literal_rhs == doctest::Approx(std::log(2.0) - 2 * std::exp(30 * std::ldexp(1.0, -27))));
  CHECK(u0.literal_rhs < 0);
  const auto u = upper_bound_check(5, 10.0);
  CHECK(std::isfinite(u.grid_max));
  CHECK(u.grid_argmax >= 0.01);
  CHECK(u.grid_argmax <= 1.0 / 3.0);
  CHECK(u.literal_holds == (u.grid_max < u.literal_rhs));
  CHECK(u.ln_variant_holds == (u.grid_max < u.ln_variant_rhs));
  CHECK(u.ln_variant_rhs < u.literal_rhs);
}

TEST_CASE("curves and CSV export") {
  const auto c = sat_overlap_curve(4, 2.0, linear_grid(0.1, 0.4, 4));
  CHECK(c.values.size() == 4);
  std::ostringstream out;
  write_curve_csv(out, c);
  CHECK(out.str().find(c.parameter + "," + c.name) == 0);
  CHECK_THROWS_AS(linear_grid(1, 0, 3), ParameterError);
  const auto lb = lambda_b_rate_curve(8, {0.0, 1.0});
  CHECK(lb.values[0] == doctest::Approx(std::log(4.0) / 2));
}
