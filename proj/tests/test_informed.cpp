#include <catch2/catch_amalgamated.hpp>

#include "chainopt/generator.hpp"
#include "chainopt/informed.hpp"
#include "test_support.hpp"

using namespace chainopt;
using namespace chainopt::testing;

namespace {

std::vector<ProblemInstance> test_instances() {
    std::vector<ProblemInstance> out;
    out.emplace_back(chain_data());
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        GeneratorParams g;
        g.n_parts = 8 + 3 * static_cast<int>(seed);
        g.n_sites = 5;
        g.seed = seed;
        g.ws_slack = 8;
        g.single_site_fraction = 0.2;
        out.push_back(generate_synthetic(g));
    }
    return out;
}

}  // namespace

TEST_CASE("isg produces penalty-free solutions") {
    for (const ProblemInstance& inst : test_instances()) {
        const auto m = build_model(inst);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Rng rng(seed);
            const Solution s = isg(*m, rng);
            REQUIRE(check_solution(*m, s.x).feasible);
            CHECK(s.eval.feasible);
            for (double p : s.eval.penalty) {
                CHECK(p == 0.0);
            }
        }
    }
}

TEST_CASE("isg is deterministic in its seed") {
    const auto m = build_model(test_instances()[2]);
    Rng a(9), b(9);
    CHECK(isg(*m, a).x == isg(*m, b).x);
}

TEST_CASE("isg keeps aliased parts on one option") {
    for (const ProblemInstance& inst : test_instances()) {
        const auto m = build_model(inst);
        Rng rng(1);
        const Assignment a = isg_assignment(*m, rng);
        for (std::size_t i = 0; i < a.part_count(); ++i) {
            if (m->reduced().aliased(i)) {
                CHECK(a.option(i, 0) == a.option(i, 1));
            }
        }
    }
}

TEST_CASE("isg reports impossible windows") {
    InstanceData d = chain_data();
    for (Supplier& u : d.suppliers) {
        u.ws_max = 1;
        u.ws_target = 0;
    }
    const auto m = build_model(ProblemInstance(d));
    Rng rng(0);
    CHECK_THROWS_AS(isg(*m, rng, 20), GenerationFailure);
}

TEST_CASE("isf leaves feasible solutions alone") {
    for (const ProblemInstance& inst : test_instances()) {
        const auto m = build_model(inst);
        Rng rng(4);
        for (int t = 0; t < 20; ++t) {
            const Solution s = isg(*m, rng);
            const IsfResult r = isf(*m, s.x, 20, rng);
            REQUIRE(r.ok);
            CHECK(r.iterations == 0);
            CHECK(r.solution.x == s.x);
            const IsfResult again = isf(*m, r.solution.x, 20, rng);
            CHECK(again.solution.x == r.solution.x);
        }
    }
}

TEST_CASE("isf repairs a dropped primary source") {
    for (const ProblemInstance& inst : test_instances()) {
        const auto m = build_model(inst);
        const VariableLayout& lay = m->layout();
        Rng rng(5);
        int ok = 0, total = 0;
        for (int t = 0; t < 50; ++t) {
            const Solution s = isg(*m, rng);
            BitVector x = s.x;
            const std::size_t g = uniform_index(rng, lay.groups().size());
            for (std::size_t v : lay.groups()[g]) {
                x[v] = 0;
            }
            ++total;
            const IsfResult r = isf(*m, x, 10, rng);
            if (r.ok) {
                ++ok;
                CHECK(check_solution(*m, r.solution.x).feasible);
            }
        }
        CHECK(ok >= total * 95 / 100);
    }
}

TEST_CASE("isf never reports an infeasible success") {
    const auto m = build_model(test_instances()[1]);
    Rng rng(6);
    for (int t = 0; t < 30; ++t) {
        BitVector x(m->size(), 1);
        if (t > 0) {
            for (auto& b : x) {
                b = uniform01(rng) < 0.5;
            }
        }
        const IsfResult r = isf(*m, x, 20, rng);
        if (r.ok) {
            CHECK(check_solution(*m, r.solution.x).feasible);
            CHECK(r.solution.eval.feasible);
        }
    }
}

TEST_CASE("isi never makes things worse") {
    for (const ProblemInstance& inst : test_instances()) {
        const auto m = build_model(inst);
        Rng rng(7);
        for (int t = 0; t < 30; ++t) {
            const Solution s = isg(*m, rng);
            const IsiResult r = isi(*m, s.x, 25, 0.5, rng);
            REQUIRE(check_solution(*m, r.solution.x).feasible);
            CHECK(r.initial == Catch::Approx(s.eval.analytic_objective).epsilon(1e-12));
            double prev = r.initial;
            for (double v : r.trace) {
                CHECK(v <= prev);
                prev = v;
            }
            CHECK(r.solution.eval.objective <= s.eval.objective + 1e-9);
        }
    }
}

TEST_CASE("isi with no iterations returns its input") {
    const auto m = build_model(test_instances()[1]);
    Rng rng(8);
    const Solution s = isg(*m, rng);
    CHECK(isi(*m, s.x, 0, 0.5, rng).solution.x == s.x);
}

TEST_CASE("isi rejects infeasible input") {
    const auto m = build_model(test_instances()[1]);
    Rng rng(8);
    CHECK_THROWS_AS(isi(*m, BitVector(m->size(), 0), 5, 0.5, rng), ContractError);
}

TEST_CASE("isi from random starts reaches the exhaustive optimum") {
    for (const auto& m : oracle_models(5, 8, 20)) {
        const double optimum = enumerate_feasible(*m).objective;
        double best = std::numeric_limits<double>::infinity();
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            Rng rng(seed);
            const Solution s = isg(*m, rng);
            best = std::min(best, isi(*m, s.x, 50, 0.0, rng).solution.eval.objective);
        }
        CHECK(best == Catch::Approx(optimum).margin(1e-9));
    }
}
