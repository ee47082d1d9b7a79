#include <algorithm>
#include <cmath>

#include "chainopt/solvers.hpp"
#include "chainopt/util.hpp"

namespace chainopt {

SpinResult sa_solve(const Ising& ising, const SaParams& params, const SpinVector& initial) {
    const std::size_t n = ising.size();
    if (initial.size() != n) {
        throw SolverError("initial state length does not match the model");
    }
    if (params.steps < 0 || params.beta_initial <= 0.0 || params.beta_final <= 0.0) {
        throw SolverError("annealing needs non-negative steps and positive inverse temperatures");
    }
    SpinResult res;
    res.s = initial;
    res.energy = ising.energy(initial);
    if (n == 0) {
        return res;
    }
    double scale = params.normalize ? ising.max_row_sum() : 1.0;
    if (scale <= 0.0) {
        scale = 1.0;
    }
    Rng rng(params.seed);
    SpinVector s = initial;
    double e = res.energy;
    const double ratio = params.steps > 1 ? std::pow(params.beta_final / params.beta_initial, 1.0 / (params.steps - 1)) : 1.0;
    double beta = params.beta_initial;
    for (int step = 0; step < params.steps; ++step) {
        const std::size_t i = uniform_index(rng, n);
        const double delta = -2.0 * s[i] * ising.local_field(s, i);
        if (delta <= 0.0 || uniform01(rng) < std::exp(-beta * delta / scale)) {
            s[i] = static_cast<std::int8_t>(-s[i]);
            e += delta;
        }
        if ((step & 1023) == 1023) {
            e = ising.energy(s);
        }
        res.trace.record(e);
        if (e < res.energy - 1e-12) {
            const double exact = ising.energy(s);
            if (exact < res.energy) {
                res.energy = exact;
                res.s = s;
            }
            e = exact;
        }
        beta *= ratio;
    }
    return res;
}

}  // namespace chainopt
