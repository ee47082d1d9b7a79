#include <algorithm>
#include <cmath>

#include "chainopt/solvers.hpp"
#include "chainopt/util.hpp"

namespace chainopt {

SpinResult cacm_solve(const Ising& ising, const CacmParams& params, const SpinVector& initial) {
    const std::size_t n = ising.size();
    if (initial.size() != n) {
        throw SolverError("initial state length does not match the model");
    }
    if (params.T < 1 || params.dt <= 0.0 || params.gamma < 0.0 || params.beta < 0.0 || params.xi < 0.0 ||
        params.a <= 0.0) {
        throw SolverError("invalid amplitude-control parameters");
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
    // below dt the second-order term cannot be resolved by the explicit step
    const double inertia = std::max(params.gamma, params.dt);
    Rng rng(params.seed);
    std::vector<double> u(n), vel(n, 0.0), err(n, 1.0), m(n), force(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = initial[i] * (0.2 + 0.1 * uniform01(rng));
    }
    SpinVector s(n);
    for (int t = 0; t < params.T; ++t) {
        const double frac = params.T > 1 ? static_cast<double>(t) / (params.T - 1) : 1.0;
        const double lambda = params.lambda1 + (params.lambda2 - params.lambda1) * frac;
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = std::tanh(u[i]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            force[i] = -lambda * u[i] - params.beta * err[i] * ising.local_field(m, i) / scale;
        }
        for (std::size_t i = 0; i < n; ++i) {
            u[i] += params.dt * vel[i];
            vel[i] += params.dt * (force[i] - vel[i]) / inertia;
            err[i] *= 1.0 - params.dt * params.xi * (m[i] * m[i] - params.a);
            err[i] = std::clamp(err[i], 1e-6, 1e6);
            if (std::abs(u[i]) > params.guard) {
                u[i] = std::copysign(params.guard, u[i]);
                vel[i] = 0.0;
                res.clamped = true;
            }
            s[i] = u[i] > 0.0 ? 1 : (u[i] < 0.0 ? -1 : s[i] == 0 ? initial[i] : s[i]);
        }
        const double e = ising.energy(s);
        res.trace.record(e);
        if (e < res.energy) {
            res.energy = e;
            res.s = s;
        }
    }
    return res;
}

}  // namespace chainopt
