#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <set>

#include "chainopt/solvers.hpp"
#include "chainopt/util.hpp"
#include "test_support.hpp"

using namespace chainopt;
using namespace chainopt::testing;

namespace {

/// Exact conditional marginals of the tree variables by enumeration of their joint states.
std::vector<double> exact_marginals(const Qubo& q, const std::vector<std::size_t>& vars, BitVector x, double beta) {
    const std::size_t n = vars.size();
    std::vector<double> energies;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            x[vars[t]] = (s >> t) & 1;
        }
        energies.push_back(q.energy(x));
    }
    const double e0 = *std::min_element(energies.begin(), energies.end());
    std::vector<double> p1(n, 0.0);
    double z = 0.0;
    for (std::uint64_t s = 0; s < energies.size(); ++s) {
        const double w = std::exp(-beta * (energies[s] - e0));
        z += w;
        for (std::size_t t = 0; t < n; ++t) {
            if ((s >> t) & 1) {
                p1[t] += w;
            }
        }
    }
    for (double& p : p1) {
        p /= z;
    }
    return p1;
}

GroupedProblem grouped(std::size_t g1, std::size_t g2, std::size_t free, std::uint64_t seed) {
    GroupedProblem p{random_qubo(g1 + g2 + free, 0.5, seed), {}};
    std::vector<std::size_t> a(g1), b(g2);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), g1);
    p.groups = {a, b};
    return p;
}

}  // namespace

TEST_CASE("annealing aligns spins with their fields") {
    std::vector<double> h{1.0, -2.0, 0.5, -0.1, 3.0};
    const Ising is(h, {}, 0.0);
    SaParams p;
    p.seed = 3;
    const SpinResult r = sa_solve(is, p, SpinVector(5, 1));
    for (std::size_t i = 0; i < h.size(); ++i) {
        CHECK(r.s[i] == (h[i] > 0 ? -1 : 1));
    }
    CHECK(r.energy == Catch::Approx(-6.6));
}

TEST_CASE("annealing finds small ground states and is reproducible") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Qubo q = random_qubo(10, 0.5, seed);
        const Ising is = to_ising(q);
        SaParams p;
        p.steps = 5000;
        p.seed = seed;
        const SpinResult a = sa_solve(is, p, SpinVector(10, -1));
        const SpinResult b = sa_solve(is, p, SpinVector(10, -1));
        CHECK(a.s == b.s);
        CHECK(a.energy == Catch::Approx(exhaustive_min(q)).margin(1e-9));
        CHECK(a.energy == Catch::Approx(is.energy(a.s)).margin(1e-12));
    }
}

TEST_CASE("sampled trees are induced trees") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Qubo q = random_qubo(15, 0.3, seed);
        const TreeSample t = sample_tree(q, seed % 15, 0, seed);
        REQUIRE(!t.vars.empty());
        CHECK(t.parent[0] == static_cast<std::size_t>(-1));
        std::set<std::size_t> in_tree(t.vars.begin(), t.vars.end());
        CHECK(in_tree.size() == t.vars.size());
        std::size_t edges = 0;
        for (const Coupling& c : q.quadratic()) {
            if (c.value != 0.0 && in_tree.count(c.i) && in_tree.count(c.j)) {
                ++edges;
            }
        }
        CHECK(edges == t.vars.size() - 1);
        for (std::size_t k = 1; k < t.vars.size(); ++k) {
            REQUIRE(t.parent[k] < k);
        }
    }
}

TEST_CASE("tree marginals equal enumeration") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const Qubo q = random_qubo(14, 0.25, seed, 2.0);
        const TreeSample t = sample_tree(q, 0, 9, seed);
        Rng rng(seed);
        BitVector x(14);
        for (auto& b : x) {
            b = uniform01(rng) < 0.5;
        }
        for (double beta : {0.5, 3.0}) {
            const TreeMarginals m = tree_marginals(q, t, x, beta, 0.0);
            const auto exact = exact_marginals(q, t.vars, x, beta);
            CHECK(m.max_normalization_error <= 1e-12);
            for (std::size_t k = 0; k < t.vars.size(); ++k) {
                CHECK(m.marginal[k][1] == Catch::Approx(exact[k]).margin(1e-9));
                CHECK(m.marginal[k][0] + m.marginal[k][1] == Catch::Approx(1.0).margin(1e-12));
            }
        }
    }
}

TEST_CASE("belief propagation solves tree problems exactly") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const Qubo q = random_tree_qubo(10, seed);
        IbpParams p;
        p.beta = 20.0;
        p.seed = seed;
        const BitResult r = ibp_solve(q, p, BitVector(10, 0));
        CHECK(r.energy == Catch::Approx(exhaustive_min(q)).margin(1e-9));
        CHECK(r.trace.best.size() == static_cast<std::size_t>(p.sweeps));
    }
}

TEST_CASE("chaotic amplitude control finds small ground states") {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Qubo q = random_qubo(16, 0.5, seed);
        const Ising is = to_ising(q);
        CacmParams p;
        p.seed = seed;
        const SpinResult r = cacm_solve(is, p, SpinVector(16, 1));
        CHECK(r.energy == Catch::Approx(is.energy(r.s)).margin(1e-12));
        CHECK_FALSE(r.clamped);
        hits += std::abs(r.energy - exhaustive_min(q)) <= 1e-9;
        const SpinResult again = cacm_solve(is, p, SpinVector(16, 1));
        CHECK(again.s == r.s);
    }
    CHECK(hits >= 15);
}

TEST_CASE("qaoa angle schedule") {
    std::vector<double> g, b;
    qaoa_schedule(1, g, b);
    CHECK(g == std::vector<double>{0.5});
    CHECK(b == std::vector<double>{0.5});
    qaoa_schedule(3, g, b);
    CHECK(g == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(b == std::vector<double>{1.0, 0.5, 0.0});
}

TEST_CASE("qaoa stays inside the one-hot subspace") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        QaoaParams qp;
        qp.p = 1 + static_cast<int>(seed % 3);
        qp.seed = seed;
        const GroupedProblem prob = grouped(2 + seed % 3, 3, seed % 3, seed);
        const QaoaResult r = qaoa_solve(prob, qp);
        CHECK(r.leakage <= kLeakageTolerance);
        int shots = 0;
        for (const QaoaSample& s : r.samples) {
            shots += s.count;
            for (const auto& group : prob.groups) {
                int ones = 0;
                for (std::size_t v : group) {
                    ones += s.x[v];
                }
                CHECK(ones == 1);
            }
            CHECK(s.energy == Catch::Approx(prob.qubo.energy(s.x)).margin(1e-12));
            CHECK(r.best_energy <= s.energy);
        }
        CHECK(shots == qp.shots);
    }
}

TEST_CASE("qaoa is reproducible and respects its qubit limit") {
    const GroupedProblem prob = grouped(3, 3, 2, 7);
    QaoaParams qp;
    qp.seed = 11;
    CHECK(qaoa_samples_csv(qaoa_solve(prob, qp)) == qaoa_samples_csv(qaoa_solve(prob, qp)));
    qp.max_qubits = 6;
    CHECK_THROWS_AS(qaoa_solve(prob, qp), SolverError);
}
