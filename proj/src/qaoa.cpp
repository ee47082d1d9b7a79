#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>

#include "chainopt/solvers.hpp"
#include "chainopt/util.hpp"

namespace chainopt {

namespace {

using Amp = std::complex<double>;

BitVector bits_of(std::uint64_t idx, std::size_t n) {
    BitVector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = (idx >> i) & 1;
    }
    return x;
}

}  // namespace

void qaoa_schedule(int p, std::vector<double>& gammas, std::vector<double>& betas) {
    if (p < 1) {
        throw SolverError("QAOA depth must be at least 1");
    }
    gammas.assign(p, 0.5);
    betas.assign(p, 0.5);
    if (p == 1) {
        return;
    }
    for (int i = 0; i < p; ++i) {
        gammas[i] = static_cast<double>(i) / (p - 1);
        betas[i] = 1.0 - gammas[i];
    }
}

QaoaResult qaoa_solve(const GroupedProblem& problem, const QaoaParams& params) {
    const Qubo& q = problem.qubo;
    const std::size_t n = q.size();
    if (n > params.max_qubits || n > 30) {
        throw SolverError("QAOA simulation limited to " + std::to_string(params.max_qubits) + " qubits, got " +
                          std::to_string(n));
    }
    if (params.shots < 1) {
        throw SolverError("QAOA needs at least one shot");
    }
    std::vector<std::uint64_t> masks;
    std::vector<bool> in_group(n, false);
    for (const auto& g : problem.groups) {
        if (g.empty()) {
            throw SolverError("empty one-hot group");
        }
        std::uint64_t mask = 0;
        for (std::size_t v : g) {
            if (v >= n || in_group[v]) {
                throw SolverError("one-hot groups must be disjoint and inside the problem");
            }
            in_group[v] = true;
            mask |= std::uint64_t{1} << v;
        }
        masks.push_back(mask);
    }
    QaoaResult res;
    qaoa_schedule(params.p, res.gammas, res.betas);

    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<double> energy(dim);
    {
        BitVector x(n, 0);
        double e = q.energy(x);
        energy[0] = e;
        std::uint64_t idx = 0;
        for (std::uint64_t g = 1; g < dim; ++g) {
            const std::size_t bit = static_cast<std::size_t>(std::countr_zero(g));
            e += q.flip_delta(x, bit);
            x[bit] ^= 1;
            idx ^= std::uint64_t{1} << bit;
            if ((g & 4095) == 0) {
                e = q.energy(x);
            }
            energy[idx] = e;
        }
    }
    auto valid = [&](std::uint64_t idx) {
        return std::all_of(masks.begin(), masks.end(), [&](std::uint64_t mk) { return std::popcount(idx & mk) == 1; });
    };

    // W state on every group, uniform superposition on free qubits
    std::vector<Amp> psi(dim, 0.0);
    double norm = 1.0;
    for (const auto& g : problem.groups) {
        norm /= std::sqrt(static_cast<double>(g.size()));
    }
    const std::size_t free_count = n - std::count(in_group.begin(), in_group.end(), true);
    norm /= std::pow(std::sqrt(2.0), static_cast<double>(free_count));
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        if (valid(idx)) {
            psi[idx] = norm;
        }
    }

    double scale = q.max_abs_coefficient();
    if (scale <= 0.0) {
        scale = 1.0;
    }
    auto pair_rotation = [&](std::size_t i, std::size_t j, double beta) {
        // exp(−iβ(XX+YY)/2) couples |01> and |10> only
        const std::uint64_t bi = std::uint64_t{1} << i, bj = std::uint64_t{1} << j;
        const double c = std::cos(beta), s = std::sin(beta);
        for (std::uint64_t idx = 0; idx < dim; ++idx) {
            if ((idx & bi) && !(idx & bj)) {
                const std::uint64_t other = (idx ^ bi) | bj;
                const Amp a = psi[idx], b = psi[other];
                psi[idx] = c * a - Amp(0.0, s) * b;
                psi[other] = -Amp(0.0, s) * a + c * b;
            }
        }
    };
    auto x_rotation = [&](std::size_t i, double beta) {
        const std::uint64_t bi = std::uint64_t{1} << i;
        const double c = std::cos(beta), s = std::sin(beta);
        for (std::uint64_t idx = 0; idx < dim; ++idx) {
            if (!(idx & bi)) {
                const Amp a = psi[idx], b = psi[idx | bi];
                psi[idx] = c * a - Amp(0.0, s) * b;
                psi[idx | bi] = -Amp(0.0, s) * a + c * b;
            }
        }
    };
    for (int layer = 0; layer < params.p; ++layer) {
        const double gamma = res.gammas[layer];
        for (std::uint64_t idx = 0; idx < dim; ++idx) {
            psi[idx] *= std::polar(1.0, -gamma * energy[idx] / scale);
        }
        const double beta = res.betas[layer];
        for (const auto& g : problem.groups) {
            for (std::size_t a = 0; a < g.size(); ++a) {
                for (std::size_t b = a + 1; b < g.size(); ++b) {
                    pair_rotation(g[a], g[b], beta);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_group[i]) {
                x_rotation(i, beta);
            }
        }
    }

    std::vector<double> cdf(dim);
    double acc = 0.0;
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        const double prob = std::norm(psi[idx]);
        if (!valid(idx)) {
            res.leakage += prob;
        }
        acc += prob;
        cdf[idx] = acc;
    }
    if (res.leakage > kLeakageTolerance) {
        throw SolverError("QAOA state left the one-hot subspace (leakage " + format_double(res.leakage) + ")");
    }
    Rng rng(params.seed);
    std::map<BitVector, int> counts;
    for (int shot = 0; shot < params.shots; ++shot) {
        const double r = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
        std::uint64_t idx = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), dim - 1));
        while (idx > 0 && std::norm(psi[idx]) == 0.0) {
            --idx;  // r landed on a flat stretch of the CDF
        }
        ++counts[bits_of(idx, n)];
    }
    bool first = true;
    for (const auto& [x, count] : counts) {
        const double e = q.energy(x);
        res.samples.push_back(QaoaSample{x, count, e});
        if (first || e < res.best_energy) {
            res.best = x;
            res.best_energy = e;
            first = false;
        }
    }
    return res;
}

std::string qaoa_samples_csv(const QaoaResult& r) {
    std::string out = "bitstring,count,energy\n";
    for (const auto& s : r.samples) {
        for (auto b : s.x) {
            out += b ? '1' : '0';
        }
        out += ',' + std::to_string(s.count) + ',' + format_double(s.energy) + '\n';
    }
    return out;
}

}  // namespace chainopt
