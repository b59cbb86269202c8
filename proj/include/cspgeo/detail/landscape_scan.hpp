#pragma once

#include <vector>

namespace cspgeo {

template <class Visit>
void for_each_assignment(const CompiledInstance& ci, std::uint64_t budget, Visit&& visit) {
  const unsigned n = ci.variable_count();
  const unsigned k = ci.domain_size();
  const std::uint64_t total = state_space_size(n, k, budget);
  std::vector<std::uint8_t> values(n, 0);
  int energy = static_cast<int>(ci.energy(values.data()));
  for (std::uint64_t step = 0; step < total; ++step) {
    visit(static_cast<const std::vector<std::uint8_t>&>(values), static_cast<unsigned>(energy));
    // Odometer increment with the last variable as the fastest digit.
    for (unsigned pos = n; pos-- > 0;) {
      const std::uint8_t next = values[pos] + 1U == k ? 0 : static_cast<std::uint8_t>(values[pos] + 1);
      energy += ci.change_delta(pos, next, values.data());
      values[pos] = next;
      if (next != 0) {
        break;
      }
    }
  }
}

}  // namespace cspgeo
