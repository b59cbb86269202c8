#include "cspgeo/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "cspgeo/combinatorics.hpp"
#include "cspgeo/errors.hpp"

namespace cspgeo {

namespace {

constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();

/// Streaming log-sum-exp.
class LogAccumulator {
 public:
  void add(long double x) {
    if (x == kNegInf) {
      return;
    }
    if (x > max_) {
      sum_ = sum_ * std::exp(max_ - x) + 1;
      max_ = x;
    } else {
      sum_ += std::exp(x - max_);
    }
  }
  [[nodiscard]] long double value() const { return sum_ == 0 ? kNegInf : max_ + std::log(sum_); }

 private:
  long double max_ = kNegInf;
  long double sum_ = 0;
};

/// C(n, k) as a long double, exact whenever it fits in 64 bits.
long double binomial_ld(unsigned n, unsigned k) {
  if (k > n) {
    return 0;
  }
  if (auto b = binomial_exact(n, k)) {
    return static_cast<long double>(*b);
  }
  return std::exp(log_binomial(n, k));
}

void require_domain(unsigned k, const char* what) {
  if (k < 2) {
    throw ParameterError(std::string(what) + ": k must be at least 2");
  }
}

}  // namespace

FirstMoment expected_solutions_coloring(unsigned n, std::uint64_t m, unsigned k) {
  require_domain(k, "expected_solutions_coloring");
  const long double pairs = static_cast<long double>(n) * (n - (n > 0 ? 1 : 0)) / 2;
  if (static_cast<long double>(m) > pairs) {
    throw ParameterError("expected_solutions_coloring: m exceeds C(n,2)");
  }
  FirstMoment fm;
  const long double lnk = std::log(static_cast<long double>(k));
  fm.log_asymptotic = n * lnk + static_cast<long double>(m) * std::log1p(-1.0L / k);
  if (m == 0) {
    fm.log_value = n * lnk;
    return fm;
  }
  const long double log_den = log_binomial(pairs, static_cast<long double>(m));
  const long double log_kfact = std::lgamma(static_cast<long double>(k) + 1);

  // Non-increasing profiles c_0 >= ... >= c_{k-1}; each stands for k!/prod(mult!) profiles.
  LogAccumulator acc;
  std::vector<unsigned> c(k, 0);
  auto finish = [&] {
    long double sq = 0;
    for (auto v : c) {
      sq += static_cast<long double>(v) * v;
    }
    const long double compatible = (static_cast<long double>(n) * n - sq) / 2;
    const long double lb = log_binomial(compatible, static_cast<long double>(m));
    if (lb == kNegInf) {
      return;
    }
    long double log_orbit = log_kfact;
    for (unsigned i = 0; i < k;) {
      unsigned j = i;
      while (j < k && c[j] == c[i]) {
        ++j;
      }
      log_orbit -= std::lgamma(static_cast<long double>(j - i) + 1);
      i = j;
    }
    acc.add(log_multinomial(c) + log_orbit - n * lnk + lb - log_den);
  };
  auto rec = [&](auto&& self, unsigned index, unsigned remaining, unsigned cap) -> void {
    if (index + 1 == k) {
      if (remaining <= cap) {
        c[index] = remaining;
        finish();
      }
      return;
    }
    // Remaining parts cannot exceed v each, so v >= remaining / (k - index).
    const unsigned lo = (remaining + (k - index) - 1) / (k - index);
    for (unsigned v = std::min(cap, remaining) + 1; v-- > lo;) {
      c[index] = v;
      self(self, index + 1, remaining - v, v);
    }
  };
  rec(rec, 0, n, n);
  fm.log_value = n * lnk + acc.value();
  return fm;
}

long double expected_solutions_sat(unsigned n, std::uint64_t m, unsigned k, bool exact) {
  if (k < 1 || k > n) {
    throw ParameterError("expected_solutions_sat: need 1 <= k <= n");
  }
  const long double ln2 = std::log(2.0L);
  const long double pk = std::ldexp(1.0L, -static_cast<int>(k));
  if (m == 0) {
    return n * ln2;
  }
  if (!exact) {
    return n * ln2 + static_cast<long double>(m) * std::log1p(-pk);
  }
  const long double subsets = binomial_ld(n, k);
  const long double all = std::ldexp(subsets, static_cast<int>(k));
  const long double satisfied = all - subsets;
  if (static_cast<long double>(m) > all) {
    throw ParameterError("expected_solutions_sat: m exceeds 2^k C(n,k)");
  }
  const auto mm = static_cast<long double>(m);
  const long double num = log_binomial(satisfied, mm);
  if (num == kNegInf) {
    return kNegInf;
  }
  return n * ln2 + num - log_binomial(all, mm);
}

long double expected_solutions_nae(unsigned n, std::uint64_t m, unsigned k) {
  if (k < 2 || k > n) {
    throw ParameterError("expected_solutions_nae: need 2 <= k <= n");
  }
  const long double edges = binomial_ld(n, k);
  const auto mm = static_cast<long double>(m);
  if (mm > edges) {
    throw ParameterError("expected_solutions_nae: m exceeds C(n,k)");
  }
  if (m == 0) {
    return n * std::log(2.0L);
  }
  const long double log_den = log_binomial(edges, mm);
  LogAccumulator acc;
  for (unsigned c = 0; c <= n; ++c) {
    const long double compatible = edges - binomial_ld(c, k) - binomial_ld(n - c, k);
    acc.add(log_binomial(n, c) + log_binomial(compatible, mm) - log_den);
  }
  return acc.value();
}

// ---------------------------------------------------------------------------------

double solve_eps(unsigned k, double tolerance) {
  require_domain(k, "solve_eps");
  if (!(tolerance > 0)) {
    throw ParameterError("solve_eps: tolerance must be positive");
  }
  if (k == 2) {
    return 1.0;
  }
  auto g = [k](long double e) { return e * std::pow(2 - e, static_cast<long double>(k - 1)) - 1; };
  // g is increasing on [0, 2/k] with g(0) = -1 < 0 < g(2/k).
  long double lo = 0;
  long double hi = 2.0L / k;
  for (int it = 0; it < 400; ++it) {
    const long double mid = (lo + hi) / 2;
    const long double v = g(mid);
    if (std::fabs(static_cast<double>(v)) < tolerance) {
      const auto e = static_cast<double>(mid);
      if (std::fabs(static_cast<double>(g(e))) < tolerance) {
        return e;
      }
    }
    if (v < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (!(lo < hi)) {
      break;
    }
  }
  throw NumericError("solve_eps: bisection did not reach the residual tolerance");
}

LambdaB lambda_b(unsigned k, double r) {
  require_domain(k, "lambda_b");
  if (!(r >= 0) || !std::isfinite(r)) {
    throw ParameterError("lambda_b: r must be finite and non-negative");
  }
  LambdaB out;
  out.eps = solve_eps(k);
  if (r == 0) {
    out.value = 4;
    out.log_value = std::log(4.0L);
    out.rate = out.log_value / 2;
    return out;
  }
  if (k == 2) {
    throw UndefinedResultError("lambda_b: the base is 0/0 at k = 2");
  }
  const long double e = out.eps;
  const long double kk = k;
  const long double top = std::exp(kk * std::log1p(-e / 2)) - std::ldexp(1.0L, -static_cast<int>(k));
  const long double log_base = 2 * std::log(top) - kk * std::log1p(-e);
  out.log_value = std::log(4.0L) + static_cast<long double>(r) * log_base;
  out.value = std::exp(out.log_value);
  out.rate = out.log_value / 2;
  return out;
}

double sat_pair_exponent(unsigned k, double r, double alpha) {
  if (k < 1) {
    throw ParameterError("sat_pair_exponent: k must be positive");
  }
  if (!(alpha >= 0 && alpha <= 1)) {
    throw ParameterError("sat_pair_exponent: alpha must lie in [0,1]");
  }
  const double p = std::ldexp(1.0, -static_cast<int>(k));
  return r * std::log1p(-2 * p + p * std::pow(1 - alpha, k));
}

double sat_overlap_exponent(unsigned k, double r, double alpha, double psi) {
  if (k < 1) {
    throw ParameterError("sat_overlap_exponent: k must be positive");
  }
  if (!(alpha >= 0 && alpha <= 1)) {
    throw ParameterError("sat_overlap_exponent: alpha must lie in (0,1)");
  }
  if (alpha == 0 || alpha == 1) {
    throw UndefinedResultError("sat_overlap_exponent: entropy term undefined at alpha in {0,1}");
  }
  const double entropy = -alpha * std::log(alpha) - (1 - alpha) * std::log1p(-alpha);
  const double denom = std::ldexp(1.0, static_cast<int>(k)) - 1;
  const double changed = -std::expm1(k * std::log1p(-alpha));  // 1 - (1 - alpha)^k
  return entropy + r * (std::log1p(-changed / denom) + psi);
}

double sat_alpha_star(unsigned k) {
  if (k < 2) {
    throw ParameterError("sat_alpha_star: k must be at least 2");
  }
  return 1.0 / (k * std::log(static_cast<double>(k)));
}

double sat_overlap_lipschitz(unsigned k, double r, double lo) {
  if (!(lo > 0 && lo <= 0.5)) {
    throw ParameterError("sat_overlap_lipschitz: lower end must lie in (0, 1/2]");
  }
  return std::log((1 - lo) / lo) + std::fabs(r) * k / (std::ldexp(1.0, static_cast<int>(k)) - 2);
}

UpperBoundReport upper_bound_check(unsigned k, double r, std::size_t grid_points) {
  if (k < 2) {
    throw ParameterError("upper_bound_check: k must be at least 2");
  }
  if (grid_points < 2) {
    throw ParameterError("upper_bound_check: need at least two grid points");
  }
  UpperBoundReport rep;
  const double p = std::ldexp(1.0, -static_cast<int>(k));
  const double penalty = 2 * std::exp(k * std::ldexp(1.0, 3 - static_cast<int>(k)));
  rep.literal_rhs = std::log(2.0) + r * (1 - p) - penalty;
  rep.ln_variant_rhs = std::log(2.0) + r * std::log1p(-p) - penalty;
  rep.grid_points = grid_points;
  rep.grid_max = -std::numeric_limits<double>::infinity();
  for (const double a : linear_grid(rep.grid_low, rep.grid_high, grid_points)) {
    const double v = sat_overlap_exponent(k, r, a);
    if (v > rep.grid_max) {
      rep.grid_max = v;
      rep.grid_argmax = a;
    }
  }
  rep.literal_holds = rep.grid_max < rep.literal_rhs;
  rep.ln_variant_holds = rep.grid_max < rep.ln_variant_rhs;
  return rep;
}

// ---------------------------------------------------------------------------------

std::vector<double> OverlapAnsatz::matrix() const {
  std::vector<double> a(static_cast<std::size_t>(k) * k, off_diagonal());
  for (unsigned i = 0; i < k; ++i) {
    a[i * k + i] = diagonal();
  }
  return a;
}

double OverlapAnsatz::frobenius() const noexcept {
  const double d = diagonal();
  const double o = off_diagonal();
  return k * d * d + static_cast<double>(k) * (k - 1) * o * o;
}

OverlapAnsatz make_ansatz(unsigned k, double h) {
  require_domain(k, "make_ansatz");
  if (!(h >= 0 && h <= 1.0 / k)) {
    throw ParameterError("make_ansatz: h must lie in [0, 1/k]");
  }
  return OverlapAnsatz{k, h};
}

OverlapAnsatz ansatz_for_overlap(unsigned k, double x) {
  require_domain(k, "ansatz_for_overlap");
  const double kk = k;
  const double lo = 1 / (kk * kk);
  const double hi = 1 / kk;
  if (!(x >= lo * (1 - 1e-12) && x <= hi * (1 + 1e-12))) {
    throw ParameterError("ansatz_for_overlap: x must lie in [1/k^2, 1/k]");
  }
  // k/(k-1) h^2 k - 2h + 1/k - x = 0, smaller root.
  const double disc = std::max(0.0, (kk * kk * x - 1) / (kk - 1));
  const double h = (kk - 1) / (kk * kk) * (1 - std::sqrt(std::min(1.0, disc)));
  return OverlapAnsatz{k, std::clamp(h, 0.0, (kk - 1) / (kk * kk))};
}

double coloring_overlap_exponent(const std::vector<double>& a, unsigned k, double r, double psi) {
  require_domain(k, "coloring_overlap_exponent");
  if (a.size() != static_cast<std::size_t>(k) * k) {
    throw ParameterError("coloring_overlap_exponent: matrix must be k x k");
  }
  long double total = 0;
  long double entropy = 0;
  long double sq = 0;
  for (double v : a) {
    if (!(v >= 0)) {
      throw ParameterError("coloring_overlap_exponent: entries must be non-negative");
    }
    total += v;
    sq += static_cast<long double>(v) * v;
    if (v > 0) {
      entropy -= v * std::log(static_cast<long double>(v));
    }
  }
  if (std::fabs(static_cast<double>(total - 1)) > 1e-9) {
    throw ParameterError("coloring_overlap_exponent: entries must sum to 1");
  }
  const long double kk = k;
  const long double ratio = (1 - 2 / kk + sq) / (1 - 1 / kk);
  return static_cast<double>(-std::log(kk) + entropy + static_cast<long double>(r) * std::log(ratio) + psi);
}

namespace {

/// Ascent on {U + D : D has zero column sums, |D| = rho, U + D > 0}. Only the entropy
/// term varies on this set, so the objective is the entropy.
class SphereAscent {
 public:
  SphereAscent(unsigned k, double rho) : k_(k), rho_(rho) {}

  [[nodiscard]] double entropy(const std::vector<double>& a) const {
    double h = 0;
    for (double v : a) {
      h -= v > 0 ? v * std::log(v) : 0.0;
    }
    return h;
  }

  /// Moves the feasible point in place; returns the number of iterations.
  unsigned run(std::vector<double>& a, unsigned max_iterations, double tol) const {
    const std::size_t kk = static_cast<std::size_t>(k_) * k_;
    const double u = 1.0 / (static_cast<double>(k_) * k_);
    std::vector<double> d(kk), g(kk), trial(kk);
    for (std::size_t i = 0; i < kk; ++i) {
      d[i] = a[i] - u;
    }
    double value = entropy(a);
    double step = 1e-3;
    unsigned it = 0;
    for (; it < max_iterations; ++it) {
      for (std::size_t i = 0; i < kk; ++i) {
        g[i] = -(std::log(a[i]) + 1);
      }
      project_columns(g);
      const double radial = dot(g, d) / (rho_ * rho_);
      for (std::size_t i = 0; i < kk; ++i) {
        g[i] -= radial * d[i];
      }
      const double gn2 = dot(g, g);
      if (std::sqrt(gn2) < tol) {
        break;
      }
      bool moved = false;
      for (int tries = 0; tries < 80; ++tries) {
        for (std::size_t i = 0; i < kk; ++i) {
          trial[i] = d[i] + step * g[i];
        }
        // the radial correction amplifies any column-sum error, so remove it every step
        project_columns(trial);
        const double scale = rho_ / std::sqrt(dot(trial, trial));
        bool positive = true;
        for (std::size_t i = 0; i < kk; ++i) {
          trial[i] = u + scale * trial[i];
          positive = positive && trial[i] > 0;
        }
        if (positive) {
          const double v = entropy(trial);
          if (v >= value + 1e-4 * step * gn2) {
            a.swap(trial);
            value = v;
            for (std::size_t i = 0; i < kk; ++i) {
              d[i] = a[i] - u;
            }
            step *= 2;
            moved = true;
            break;
          }
        }
        step /= 2;
      }
      if (!moved) {
        break;
      }
    }
    return it;
  }

 private:
  void project_columns(std::vector<double>& g) const {
    for (unsigned j = 0; j < k_; ++j) {
      double mean = 0;
      for (unsigned i = 0; i < k_; ++i) {
        mean += g[i * k_ + j];
      }
      mean /= k_;
      for (unsigned i = 0; i < k_; ++i) {
        g[i * k_ + j] -= mean;
      }
    }
  }
  static double dot(const std::vector<double>& x, const std::vector<double>& y) {
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
  }

  unsigned k_;
  double rho_;
};

/// U + rho (B - U)/|B - U| for a matrix B with column sums 1/k and |B - U| >= rho,
/// which is a convex combination of U and B and hence non-negative.
std::vector<double> pull_to_sphere(const std::vector<double>& b, unsigned k, double rho) {
  const double u = 1.0 / (static_cast<double>(k) * k);
  double norm = 0;
  for (double v : b) {
    norm += (v - u) * (v - u);
  }
  norm = std::sqrt(norm);
  std::vector<double> a(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    a[i] = u + rho * (b[i] - u) / norm;
  }
  return a;
}

}  // namespace

OptimizerResult maximize_coloring_exponent(unsigned k, double r, double x, double psi, OptimizerOptions opts) {
  require_domain(k, "maximize_coloring_exponent");
  const double kk = k;
  const double lo = 1 / (kk * kk);
  if (!(x >= lo * (1 - 1e-12) && x < 1 / kk)) {
    throw ParameterError("maximize_coloring_exponent: x must lie in [1/k^2, 1/k)");
  }
  OptimizerResult res;
  res.k = k;
  res.r = r;
  res.x = x;
  res.psi = psi;
  const auto ansatz = ansatz_for_overlap(k, x);
  res.ansatz_h = ansatz.h;
  res.ansatz_value = coloring_overlap_exponent(ansatz.matrix(), k, r, psi);

  const double rho2 = x - lo;
  if (rho2 <= 1e-15) {
    res.matrix.assign(static_cast<std::size_t>(k) * k, lo);
    res.value = coloring_overlap_exponent(res.matrix, k, r, psi);
    res.starts = 1;
    return res;
  }
  const double rho = std::sqrt(rho2);
  const SphereAscent ascent(k, rho);
  const std::size_t cells = static_cast<std::size_t>(k) * k;

  std::vector<std::vector<double>> starts;
  starts.push_back(ansatz.matrix());
  {
    // Each column splits its mass between rows j and j+1.
    std::vector<double> b(cells, 0.0);
    for (unsigned j = 0; j < k; ++j) {
      b[j * k + j] += 0.5 / kk;
      b[((j + 1) % k) * k + j] += 0.5 / kk;
    }
    double dist = 0;
    for (double v : b) {
      dist += (v - lo) * (v - lo);
    }
    if (dist >= rho2) {
      starts.push_back(pull_to_sphere(b, k, rho));
    }
  }
  Rng rng(opts.seed);
  for (unsigned s = 0; s < opts.random_starts; ++s) {
    // Each column sits on a random row, blended with a random column-stochastic matrix.
    Rng local = rng.split(s);
    std::vector<double> b(cells, 0.0);
    std::vector<double> noise(cells);
    for (unsigned j = 0; j < k; ++j) {
      double sum = 0;
      for (unsigned i = 0; i < k; ++i) {
        noise[i * k + j] = local.uniform() + 1e-3;
        sum += noise[i * k + j];
      }
      for (unsigned i = 0; i < k; ++i) {
        noise[i * k + j] /= sum * kk;
      }
      b[local.below(k) * k + j] = 1 / kk;
    }
    for (double eta = 0.5 * local.uniform(); eta > 1e-9; eta /= 2) {
      std::vector<double> mix(cells);
      double dist = 0;
      for (std::size_t i = 0; i < cells; ++i) {
        mix[i] = (1 - eta) * b[i] + eta * noise[i];
        dist += (mix[i] - lo) * (mix[i] - lo);
      }
      if (dist >= rho2) {
        starts.push_back(pull_to_sphere(mix, k, rho));
        break;
      }
    }
  }

  res.value = -std::numeric_limits<double>::infinity();
  for (unsigned s = 0; s < starts.size(); ++s) {
    auto a = starts[s];
    ascent.run(a, opts.max_iterations, opts.gradient_tolerance);
    const double v = coloring_overlap_exponent(a, k, r, psi);
    if (v > res.value) {
      res.value = v;
      res.matrix = a;
      res.best_start = s;
    }
  }
  res.starts = static_cast<unsigned>(starts.size());
  return res;
}

// ---------------------------------------------------------------------------------

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(lo < hi)) {
    throw ParameterError("linear_grid: need lo < hi and at least two points");
  }
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  g.back() = hi;
  return g;
}

ExponentCurve sat_overlap_curve(unsigned k, double r, const std::vector<double>& alphas, double psi) {
  ExponentCurve c{"alpha", "sat_overlap_exponent", alphas, {}};
  for (double a : alphas) {
    c.values.push_back(sat_overlap_exponent(k, r, a, psi));
  }
  return c;
}

ExponentCurve coloring_ansatz_curve(unsigned k, double r, const std::vector<double>& hs, double psi) {
  ExponentCurve c{"h", "coloring_overlap_exponent", hs, {}};
  for (double h : hs) {
    c.values.push_back(coloring_overlap_exponent(make_ansatz(k, h).matrix(), k, r, psi));
  }
  return c;
}

ExponentCurve lambda_b_rate_curve(unsigned k, const std::vector<double>& rs) {
  ExponentCurve c{"r", "half_log_lambda_b", rs, {}};
  for (double r : rs) {
    c.values.push_back(static_cast<double>(lambda_b(k, r).rate));
  }
  return c;
}

void write_curve_csv(std::ostream& out, const ExponentCurve& curve) {
  const auto old = out.precision(17);
  out << curve.parameter << ',' << curve.name << '\n';
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out << curve.grid[i] << ',' << curve.values[i] << '\n';
  }
  out.precision(old);
}

}  // namespace cspgeo
