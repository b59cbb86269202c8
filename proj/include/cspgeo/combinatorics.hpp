#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cspgeo {

/// Exact C(n, r), or nullopt when it does not fit in 64 bits.
std::optional<std::uint64_t> binomial_exact(std::uint64_t n, std::uint64_t r);

/// C(n, r); throws ParameterError on overflow.
std::uint64_t binomial_checked(std::uint64_t n, std::uint64_t r);

/// ln C(n, r). Returns -inf when r > n. Accurate when n is huge and r small.
long double log_binomial(long double n, long double r);

/// ln n(n-1)...(n-r+1) for real n >= r >= 0. Returns -inf when r > n.
long double log_falling(long double n, long double r);

/// Overflow-checked integer power.
std::optional<std::uint64_t> checked_pow(std::uint64_t base, unsigned exponent);

/// Numerically stable ln(sum_i exp(terms[i])). Empty or all -inf gives -inf.
long double log_sum_exp(std::span<const long double> terms);

/// Writes the colex-rank `rank` r-subset of {0..n-1} into `out` (ascending).
/// rank must be < C(n, r).
void unrank_combination(std::uint64_t rank, unsigned n, unsigned r, std::span<std::uint32_t> out);

/// Inverse of unrank_combination for an ascending subset.
std::uint64_t rank_combination(std::span<const std::uint32_t> subset);

/// All compositions (c_0..c_{parts-1}) of `total` into `parts` non-negative parts,
/// visited in lexicographic order.
template <class Visit>
void for_each_composition(unsigned total, unsigned parts, Visit&& visit) {
  std::vector<unsigned> c(parts, 0);
  if (parts == 0) {
    return;
  }
  auto rec = [&](auto&& self, unsigned index, unsigned remaining) -> void {
    if (index + 1 == parts) {
      c[index] = remaining;
      visit(static_cast<const std::vector<unsigned>&>(c));
      return;
    }
    for (unsigned v = 0; v <= remaining; ++v) {
      c[index] = v;
      self(self, index + 1, remaining - v);
    }
  };
  rec(rec, 0, total);
}

/// ln of the multinomial coefficient total! / prod(c_i!).
long double log_multinomial(std::span<const unsigned> parts);

}  // namespace cspgeo
