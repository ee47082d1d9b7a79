#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "chainopt/generator.hpp"
#include "chainopt/informed.hpp"
#include "chainopt/model.hpp"
#include "chainopt/solvers.hpp"
#include "chainopt/util.hpp"
#include "test_support.hpp"

using namespace chainopt;
using namespace chainopt::testing;

namespace {

BitVector random_bits(std::size_t n, Rng& rng) {
    BitVector x(n);
    for (auto& b : x) {
        b = uniform01(rng) < 0.5;
    }
    return x;
}

BitVector bits_of(std::uint64_t s, std::size_t n) {
    BitVector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = (s >> i) & 1;
    }
    return x;
}

}  // namespace

TEST_CASE("triplets merge duplicates and fold the diagonal") {
    const Qubo q = Qubo::from_triplets(3, {{0, 1, 1.0}, {1, 0, 2.0}, {2, 2, 5.0}}, {1.0, 0.0, 0.0}, 0.5);
    CHECK(q.quadratic().size() == 1);
    CHECK(q.quadratic()[0].value == 3.0);
    CHECK(q.linear()[2] == 5.0);
    CHECK(q.energy({1, 1, 1}) == 9.5);
}

TEST_CASE("energy and flip delta agree with the coefficient lists") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Qubo q = random_qubo(12, 0.4, seed);
        Rng rng(seed);
        for (int t = 0; t < 50; ++t) {
            BitVector x = random_bits(12, rng);
            const double e = q.energy(x);
            CHECK(e == Catch::Approx(naive_energy(q, x)).margin(1e-12));
            const std::size_t i = uniform_index(rng, 12);
            const double d = q.flip_delta(x, i);
            x[i] ^= 1;
            CHECK(q.energy(x) - e == Catch::Approx(d).margin(1e-12));
        }
    }
}

TEST_CASE("ising form reproduces every qubo energy") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Qubo q = random_qubo(10, 0.5, seed, 3.0);
        const Ising is = to_ising(q);
        for (std::uint64_t s = 0; s < 1024; ++s) {
            const BitVector x = bits_of(s, 10);
            CHECK(is.energy(to_spins(x)) == Catch::Approx(q.energy(x)).margin(1e-12));
            CHECK(to_bits(to_spins(x)) == x);
        }
    }
}

TEST_CASE("compiled models: matrix and analytic evaluation agree") {
    std::vector<std::shared_ptr<const QuboModel>> models;
    models.push_back(build_model(ProblemInstance(chain_data())));
    Multipliers no_windows;
    no_windows.lambda[4] = no_windows.lambda[5] = 0.0;
    models.push_back(build_model(ProblemInstance(chain_data()), {}, no_windows));
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        GeneratorParams g;
        g.n_parts = 6 + static_cast<int>(seed);
        g.seed = seed;
        models.push_back(build_model(generate_synthetic(g), {{0.1, 0.2, 0.3, 0.4}}));
    }
    for (const auto& m : models) {
        Rng rng(m->size());
        for (int t = 0; t < 1000; ++t) {
            const Evaluation e = evaluate(*m, random_bits(m->size(), rng));
            REQUIRE(e.objective == Catch::Approx(e.analytic_objective).epsilon(1e-9).margin(1e-9));
        }
    }
}

TEST_CASE("feasible assignments carry zero penalty and the oracle objective") {
    for (const auto& m : oracle_models(5, 6, 40)) {
        Rng rng(5);
        for (int t = 0; t < 20; ++t) {
            const Solution s = isg(*m, rng);
            const Evaluation e = evaluate(*m, s.x);
            CHECK(e.feasible);
            for (double p : e.penalty) {
                CHECK(p == Catch::Approx(0.0).margin(1e-12));
            }
            Assignment a(*m);
            REQUIRE(decode_strict(*m, s.x, a));
            CHECK(e.objective == Catch::Approx(oracle_objective(*m, a.choice())).epsilon(1e-10));
        }
    }
}

TEST_CASE("evaluation feasibility implies the independent checker") {
    const auto m = build_model(generate_synthetic(tiny_params(4, 4)));
    Rng rng(1);
    std::size_t feasible = 0;
    for (int t = 0; t < 5000; ++t) {
        BitVector x = isg(*m, rng).x;
        for (int f = 0; f < 2; ++f) {
            const std::size_t i = uniform_index(rng, m->size());
            x[i] ^= 1;
        }
        if (evaluate(*m, x).feasible) {
            ++feasible;
            CHECK(check_solution(*m, x).feasible);
        }
    }
    CHECK(feasible > 0);
}

TEST_CASE("ancilla bit counts") {
    CHECK(ancilla_bits(0) == 0);
    CHECK(ancilla_bits(1) == 1);
    CHECK(ancilla_bits(2) == 2);
    CHECK(ancilla_bits(3) == 2);
    CHECK(ancilla_bits(4) == 3);
    CHECK(ancilla_bits(1023) == 10);
    CHECK_THROWS_AS(ancilla_bits(-1), ModelError);
}

TEST_CASE("ancilla fill zeroes window penalties exactly when windows hold") {
    const auto m = build_model(generate_synthetic(tiny_params(6, 5)));
    Rng rng(2);
    for (int t = 0; t < 200; ++t) {
        BitVector x = isg(*m, rng).x;
        if (t % 2 == 1) {
            // random assignment bits, possibly breaking windows
            for (std::size_t i = 0; i < m->layout().assignment_count(); ++i) {
                x[i] = uniform01(rng) < 0.3;
            }
        }
        const AncillaFill fill = ancilla_fill(*m, x);
        const Evaluation e = evaluate(*m, fill.x);
        std::vector<std::int64_t> sites, sups;
        workshare_loads(*m, x, sites, sups);
        bool inside = true;
        for (std::size_t k = 0; k < sites.size(); ++k) {
            inside = inside && sites[k] >= m->site_window(k).lower && sites[k] <= m->site_window(k).upper;
        }
        for (std::size_t u = 0; u < sups.size(); ++u) {
            inside = inside && sups[u] >= m->supplier_window(u).lower && sups[u] <= m->supplier_window(u).upper;
        }
        CHECK(fill.ok == inside);
        CHECK((e.penalty[4] == 0.0 && e.penalty[5] == 0.0) == inside);
    }
}

TEST_CASE("brute force finds the enumerated minimum in both orders") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const std::size_t n = 4 + seed % 11;
        const Qubo q = random_qubo(n, 0.5, seed);
        const BruteForceResult a = brute_force(q);
        const BruteForceResult b = brute_force(q, true);
        const double expected = exhaustive_min(q);
        CHECK(a.energy == Catch::Approx(expected).margin(1e-12));
        CHECK(q.energy(a.x) == Catch::Approx(expected).margin(1e-12));
        CHECK(a.x == b.x);
    }
}

TEST_CASE("brute force breaks ties toward the smallest bitstring") {
    const Qubo flat(5);
    CHECK(brute_force(flat).x == BitVector(5, 0));
    // two degenerate minima: x = 10 and x = 01
    const Qubo q = Qubo::from_triplets(2, {{0, 1, 2.0}}, {-1.0, -1.0}, 0.0);
    CHECK(brute_force(q).x == BitVector{0, 1});
    CHECK(brute_force(q, true).x == BitVector{0, 1});
}

TEST_CASE("brute force refuses oversized problems") {
    CHECK_THROWS_AS(brute_force(Qubo(kBruteForceCap + 1)), SolverError);
}

TEST_CASE("coo export lists every nonzero coefficient once") {
    const auto m = build_model(ProblemInstance(chain_data()));
    std::istringstream in(model_coo(*m));
    std::size_t i = 0, j = 0, lines = 0;
    double v = 0.0;
    std::vector<double> lin(m->size(), 0.0);
    std::vector<Coupling> quad;
    while (in >> i >> j >> v) {
        ++lines;
        REQUIRE(i <= j);
        if (i == j) {
            lin[i] = v;
        } else {
            quad.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), v});
        }
    }
    const Qubo back = Qubo::from_triplets(m->size(), quad, lin, m->qubo().offset());
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        const BitVector x = random_bits(m->size(), rng);
        CHECK(back.energy(x) == Catch::Approx(m->qubo().energy(x)).epsilon(1e-12));
    }
}
