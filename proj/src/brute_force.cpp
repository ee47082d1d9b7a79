#include <bit>
#include <cmath>
#include <string>

#include "chainopt/solvers.hpp"

namespace chainopt {

BruteForceResult brute_force(const Qubo& q, bool reverse_order) {
    const std::size_t n = q.size();
    if (n > kBruteForceCap) {
        throw SolverError("exhaustive search is limited to " + std::to_string(kBruteForceCap) + " variables, got " +
                          std::to_string(n));
    }
    BitVector x(n, 0);
    BruteForceResult best{x, q.energy(x)};
    double running = best.energy;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const std::size_t bit = static_cast<std::size_t>(std::countr_zero(g));
        const std::size_t idx = reverse_order ? n - 1 - bit : bit;
        running += q.flip_delta(x, idx);
        x[idx] ^= 1;
        if ((g & 4095) == 0) {
            running = q.energy(x);
        }
        const double scale = std::max(1.0, std::abs(best.energy));
        if (running > best.energy + 1e-9 * scale) {
            continue;
        }
        const double exact = q.energy(x);
        const double tie = 1e-12 * scale;
        if (exact < best.energy - tie || (exact <= best.energy + tie && x < best.x)) {
            best.x = x;
            best.energy = exact;
        }
        running = exact;
    }
    return best;
}

}  // namespace chainopt
