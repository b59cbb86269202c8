#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cspgeo/rng.hpp"

namespace cspgeo {

// First moments, natural log scale ------------------------------------------------

struct FirstMoment {
  long double log_value = 0;       // exact ln E|S|
  long double log_asymptotic = 0;  // n ln k + m ln(1 - 1/k)
};

/// ln E|S(G(n,m))| for k-coloring, summing C(N(sigma), m) / C(C(n,2), m) over the
/// class-size profiles of sigma. -inf when no k-partition admits m bichromatic edges.
FirstMoment expected_solutions_coloring(unsigned n, std::uint64_t m, unsigned k);

/// ln E|S(F_k(n,m))|. Independent clauses: n ln 2 + m ln(1 - 2^-k). Exact (distinct
/// clauses): ln[2^n C((2^k - 1) C(n,k), m) / C(2^k C(n,k), m)], -inf if m exceeds the
/// number of clauses one assignment can satisfy.
long double expected_solutions_sat(unsigned n, std::uint64_t m, unsigned k, bool exact);

/// ln E|S| for NAE 2-coloring of a uniform k-uniform hypergraph with m distinct edges.
long double expected_solutions_nae(unsigned n, std::uint64_t m, unsigned k);

// k-SAT pair quantities ---------------------------------------------------------------

/// Root of eps (2 - eps)^(k-1) = 1 in (0, 1]; eps = 1 for k = 2, otherwise the root in
/// (0, 2/k) found by bisection until the residual is below `tolerance`.
double solve_eps(unsigned k, double tolerance = 1e-14);

struct LambdaB {
  long double value = 0;      // 4 [((1 - eps/2)^k - 2^-k)^2 / (1 - eps)^k]^r
  long double log_value = 0;
  long double rate = 0;       // ln(value) / 2
  double eps = 0;
};
LambdaB lambda_b(unsigned k, double r);

/// r ln(1 - 2^(1-k) + 2^-k (1 - alpha)^k).
double sat_pair_exponent(unsigned k, double r, double alpha);

/// H(alpha) + r [ln(1 - (1 - (1 - alpha)^k) / (2^k - 1)) + psi]. alpha must lie in (0,1).
double sat_overlap_exponent(unsigned k, double r, double alpha, double psi = 0.0);

/// alpha* = 1 / (k ln k).
double sat_alpha_star(unsigned k);

/// Lipschitz constant of sat_overlap_exponent on [lo, hi] within (0, 1/2]:
/// ln((1 - lo)/lo) + r k / (2^k - 2).
double sat_overlap_lipschitz(unsigned k, double r, double lo);

struct UpperBoundReport {
  double literal_rhs = 0;     // ln 2 + r (1 - 2^-k) - 2 exp(k 2^(3-k))
  double ln_variant_rhs = 0;  // ln 2 + r ln(1 - 2^-k) - 2 exp(k 2^(3-k))
  double grid_max = 0;        // max of sat_overlap_exponent(psi = 0) on the grid
  double grid_argmax = 0;
  double grid_low = 0.01;
  double grid_high = 1.0 / 3.0;
  std::size_t grid_points = 0;
  bool literal_holds = false;     // grid_max < literal_rhs
  bool ln_variant_holds = false;  // grid_max < ln_variant_rhs
};
UpperBoundReport upper_bound_check(unsigned k, double r, std::size_t grid_points = 1001);

// Coloring overlap exponent ----------------------------------------------------------

/// Row-major k x k matrix.
struct OverlapAnsatz {
  unsigned k = 0;
  double h = 0;

  [[nodiscard]] double diagonal() const noexcept { return 1.0 / k - h; }
  [[nodiscard]] double off_diagonal() const noexcept { return h / (k - 1); }
  [[nodiscard]] std::vector<double> matrix() const;
  [[nodiscard]] double frobenius() const noexcept;
};

/// Requires 0 <= h <= 1/k.
OverlapAnsatz make_ansatz(unsigned k, double h);

/// Ansatz with squared Frobenius norm x; requires 1/k^2 <= x <= 1/k.
OverlapAnsatz ansatz_for_overlap(unsigned k, double x);

/// -ln k - sum a ln a + r ln((1 - 2/k + sum a^2) / (1 - 1/k)) + psi, with 0 ln 0 = 0.
double coloring_overlap_exponent(const std::vector<double>& a, unsigned k, double r, double psi = 0.0);

struct OptimizerOptions {
  unsigned random_starts = 8;
  unsigned max_iterations = 20000;
  double gradient_tolerance = 1e-11;
  Seed seed{0xC0FFEE};
};

struct OptimizerResult {
  unsigned k = 0;
  double r = 0;
  double x = 0;
  double psi = 0;
  std::vector<double> matrix;  // best A found
  double value = 0;
  double ansatz_h = 0;
  double ansatz_value = 0;     // lower bound on the maximum
  unsigned starts = 0;
  unsigned best_start = 0;     // 0 = ansatz, 1 = spread, 2.. = random
};

/// Maximizes the coloring exponent over A(x) = {A >= 0, column sums 1/k, sum a^2 = x}
/// by Riemannian gradient ascent on the sphere of the column-sum subspace.
/// Requires 1/k^2 <= x < 1/k; at x = 1/k^2 the uniform matrix is the only point.
OptimizerResult maximize_coloring_exponent(unsigned k, double r, double x, double psi = 0.0,
                                           OptimizerOptions opts = {});

// Curves -------------------------------------------------------------------------------

struct ExponentCurve {
  std::string parameter;  // column name of the grid
  std::string name;       // column name of the values
  std::vector<double> grid;
  std::vector<double> values;
};

/// Evenly spaced grid with `points` >= 2 values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

ExponentCurve sat_overlap_curve(unsigned k, double r, const std::vector<double>& alphas, double psi = 0.0);
ExponentCurve coloring_ansatz_curve(unsigned k, double r, const std::vector<double>& hs, double psi = 0.0);
ExponentCurve lambda_b_rate_curve(unsigned k, const std::vector<double>& rs);

void write_curve_csv(std::ostream& out, const ExponentCurve& curve);

}  // namespace cspgeo
