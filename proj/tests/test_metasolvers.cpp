#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "chainopt/generator.hpp"
#include "chainopt/informed.hpp"
#include "chainopt/metasolvers.hpp"
#include "chainopt/subproblem.hpp"
#include "test_support.hpp"

using namespace chainopt;
using namespace chainopt::testing;

TEST_CASE("sub-problem energy equals the full energy for every local setting") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Qubo q = random_qubo(16, 0.4, seed);
        Rng rng(seed);
        BitVector x(16);
        for (auto& b : x) {
            b = uniform01(rng) < 0.5;
        }
        std::vector<std::size_t> all(16);
        std::iota(all.begin(), all.end(), 0);
        shuffle(all, rng);
        const std::vector<std::size_t> sel(all.begin(), all.begin() + 6);
        const SubProblem sub = build_subproblem(q, x, sel);
        CHECK(sub.problem.qubo.size() == 6);
        CHECK(merge_subsolution(sub, x, restrict_to(sub, x)) == x);
        for (std::uint64_t s = 0; s < 64; ++s) {
            BitVector local(6);
            for (std::size_t t = 0; t < 6; ++t) {
                local[t] = (s >> t) & 1;
            }
            CHECK(sub.problem.qubo.energy(local) ==
                  Catch::Approx(q.energy(merge_subsolution(sub, x, local))).margin(1e-12));
        }
    }
}

TEST_CASE("sub-problem groups follow the one-hot layout") {
    const auto m = build_model(ProblemInstance(chain_data()));
    const VariableLayout& lay = m->layout();
    Rng rng(1);
    const Solution s = isg(*m, rng);
    std::vector<std::size_t> sel = lay.groups()[0];
    sel.push_back(lay.groups()[1][0]);
    const SubProblem sub = build_subproblem(m->qubo(), s.x, sel, &lay);
    REQUIRE(!sub.problem.groups.empty());
    CHECK(sub.problem.groups[0].size() == lay.groups()[0].size());
    for (const auto& g : sub.problem.groups) {
        for (std::size_t v : g) {
            CHECK(v < sel.size());
        }
    }
}

TEST_CASE("sub-problem selection is validated") {
    const Qubo q = random_qubo(5, 0.5, 1);
    const BitVector x(5, 0);
    CHECK_THROWS(build_subproblem(q, x, {}));
    CHECK_THROWS(build_subproblem(q, x, {1, 1}));
}

TEST_CASE("solver names round trip") {
    for (SubSolver s : {SubSolver::Qaoa, SubSolver::Sa, SubSolver::BruteForce}) {
        CHECK(parse_sub_solver(sub_solver_name(s)) == s);
    }
    for (HbsSolver s : {HbsSolver::Cacm, HbsSolver::Ibp, HbsSolver::Qaoa}) {
        CHECK(parse_hbs_solver(hbs_solver_name(s)) == s);
    }
    CHECK_THROWS(parse_sub_solver("gurobi"));
}

TEST_CASE("iqts reaches the exhaustive optimum on small models") {
    for (const auto& m : oracle_models(3, 10, 18)) {
        IqtsConfig cfg;
        cfg.sub_solver = SubSolver::BruteForce;
        cfg.kappa = 10;
        cfg.seed = 3;
        const IqtsResult r = iqts_solve(*m, cfg);
        CHECK(check_solution(*m, r.best.x).feasible);
        CHECK(r.best.eval.objective == Catch::Approx(enumerate_feasible(*m).objective).margin(1e-9));
    }
}

TEST_CASE("iqts incumbent never increases and stays feasible") {
    GeneratorParams g;
    g.n_parts = 10;
    g.seed = 5;
    const auto m = build_model(generate_synthetic(g));
    for (SubSolver s : {SubSolver::Qaoa, SubSolver::Sa}) {
        IqtsConfig cfg;
        cfg.sub_solver = s;
        cfg.kappa = 2;
        cfg.n = 8;
        cfg.seed = 4;
        const IqtsResult r = iqts_solve(*m, cfg);
        CHECK(check_solution(*m, r.best.x).feasible);
        REQUIRE(!r.trace.empty());
        for (std::size_t k = 1; k < r.trace.size(); ++k) {
            CHECK(r.trace[k].incumbent <= r.trace[k - 1].incumbent);
            if (r.trace[k].accepted) {
                CHECK(r.trace[k].incumbent == r.trace[k].candidate);
            }
        }
        CHECK(r.best.eval.objective == Catch::Approx(r.trace.back().incumbent).epsilon(1e-12));
        cfg.literal_zero = true;
        CHECK(check_solution(*m, iqts_solve(*m, cfg).best.x).feasible);
    }
}

TEST_CASE("iqts is reproducible") {
    const auto m = build_model(generate_synthetic(tiny_params(2, 5)));
    IqtsConfig cfg;
    cfg.kappa = 2;
    cfg.seed = 8;
    CHECK(iqts_trace_csv(iqts_solve(*m, cfg)) == iqts_trace_csv(iqts_solve(*m, cfg)));
}

TEST_CASE("hbs improves on its seeds and keeps a monotone incumbent") {
    GeneratorParams g;
    g.n_parts = 8;
    g.seed = 6;
    Multipliers mult;
    mult.lambda[4] = mult.lambda[5] = 0.0;
    const auto m = build_model(generate_synthetic(g), {}, mult);
    HbsConfig cfg;
    cfg.max_iterations = 30;
    cfg.seed = 2;
    const HbsResult r = hbs_solve(*m, cfg);
    CHECK(check_solution(*m, r.best.x).feasible);
    REQUIRE(!r.trace.empty());
    CHECK(r.iterations == static_cast<int>(r.trace.size()));
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
        CHECK(r.trace[k].incumbent <= r.trace[k - 1].incumbent);
        CHECK(r.trace[k].params.size() == cfg.solvers.size());
    }
    CHECK(r.best.eval.objective == Catch::Approx(r.trace.back().incumbent).epsilon(1e-12));
    CHECK(hbs_trace_csv(r, cfg) == hbs_trace_csv(hbs_solve(*m, cfg), cfg));
}

TEST_CASE("hbs runs every solver family") {
    const auto m = build_model(generate_synthetic(tiny_params(3, 4)));
    HbsConfig cfg;
    cfg.solvers = {HbsSolver::Cacm, HbsSolver::Ibp, HbsSolver::Qaoa};
    cfg.max_iterations = 5;
    cfg.qaoa_qubits = 8;
    const HbsResult r = hbs_solve(*m, cfg);
    CHECK(check_solution(*m, r.best.x).feasible);
    CHECK(hbs_search_space(HbsSolver::Qaoa).empty());
    CHECK(hbs_search_space(HbsSolver::Cacm).size() == 7);
}

TEST_CASE("hbs reaches the exhaustive optimum on small models") {
    for (const auto& m : oracle_models(3, 10, 18, 40)) {
        HbsConfig cfg;
        cfg.seed = 1;
        const HbsResult r = hbs_solve(*m, cfg);
        CHECK(r.best.eval.objective == Catch::Approx(enumerate_feasible(*m).objective).margin(1e-9));
    }
}
