#include "cspgeo/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cspgeo/errors.hpp"

namespace cspgeo {

std::optional<std::uint64_t> binomial_exact(std::uint64_t n, std::uint64_t r) {
  if (r > n) {
    return 0;
  }
  r = std::min(r, n - r);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    // acc * (n - r + i) / i stays integral at every step.
    acc = acc * (n - r + i);
    acc /= i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      return std::nullopt;
    }
  }
  return static_cast<std::uint64_t>(acc);
}

std::uint64_t binomial_checked(std::uint64_t n, std::uint64_t r) {
  auto v = binomial_exact(n, r);
  if (!v) {
    throw ParameterError("binomial coefficient C(" + std::to_string(n) + "," + std::to_string(r) +
                         ") exceeds 64 bits");
  }
  return *v;
}

long double log_binomial(long double n, long double r) {
  if (r < 0 || r > n) {
    return -std::numeric_limits<long double>::infinity();
  }
  if (r == 0 || r == n) {
    return 0.0L;
  }
  const long double small = std::min(r, n - r);
  return log_falling(n, small) - std::lgamma(small + 1.0L);
}

long double log_falling(long double n, long double r) {
  if (r < 0 || r > n) {
    return -std::numeric_limits<long double>::infinity();
  }
  if (r == 0) {
    return 0.0L;
  }
  const long double rest = n - r;
  if (rest < 1e4L) {
    return std::lgamma(n + 1.0L) - std::lgamma(rest + 1.0L);
  }
  // Stirling series for lgamma(n+1) - lgamma(rest+1). Subtracting the two lgamma values
  // directly loses every digit once n is far above r (n ~ 1e21, r ~ 1e5).
  const long double lead = r * std::log(n) - (rest + 0.5L) * std::log1p(-r / n) - r;
  const long double c1 = (1 / n - 1 / rest) / 12;
  const long double c3 = (1 / (n * n * n) - 1 / (rest * rest * rest)) / 360;
  return lead + c1 - c3;
}

std::optional<std::uint64_t> checked_pow(std::uint64_t base, unsigned exponent) {
  unsigned __int128 acc = 1;
  for (unsigned i = 0; i < exponent; ++i) {
    acc *= base;
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      return std::nullopt;
    }
  }
  return static_cast<std::uint64_t>(acc);
}

long double log_sum_exp(std::span<const long double> terms) {
  long double top = -std::numeric_limits<long double>::infinity();
  for (long double t : terms) {
    top = std::max(top, t);
  }
  if (!std::isfinite(top)) {
    return top;
  }
  long double sum = 0.0L;
  for (long double t : terms) {
    sum += std::exp(t - top);
  }
  return top + std::log(sum);
}

void unrank_combination(std::uint64_t rank, unsigned n, unsigned r, std::span<std::uint32_t> out) {
  // Colex order: the largest element c satisfies C(c, r) <= rank < C(c+1, r).
  unsigned hi = n;
  for (unsigned slot = r; slot > 0; --slot) {
    unsigned c = slot - 1;
    // Binary search the largest c in [slot-1, hi-1] with C(c, slot) <= rank.
    unsigned lo = slot - 1;
    unsigned up = hi - 1;
    while (lo < up) {
      const unsigned mid = lo + (up - lo + 1) / 2;
      const auto b = binomial_exact(mid, slot);
      if (b && *b <= rank) {
        lo = mid;
      } else {
        up = mid - 1;
      }
    }
    c = lo;
    out[slot - 1] = c;
    rank -= *binomial_exact(c, slot);
    hi = c;
  }
}

std::uint64_t rank_combination(std::span<const std::uint32_t> subset) {
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    rank += binomial_checked(subset[i], i + 1);
  }
  return rank;
}

long double log_multinomial(std::span<const unsigned> parts) {
  long double total = 0;
  long double acc = 0;
  for (unsigned p : parts) {
    total += p;
    acc -= std::lgamma(static_cast<long double>(p) + 1.0L);
  }
  return acc + std::lgamma(total + 1.0L);
}

}  // namespace cspgeo
