#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "chainopt/generator.hpp"
#include "chainopt/preprocess.hpp"
#include "chainopt/rational.hpp"
#include "chainopt/util.hpp"
#include "test_support.hpp"

using namespace chainopt;
using namespace chainopt::testing;

namespace {

std::array<double, 3> random_weights(Rng& rng) {
    return {uniform01(rng), uniform01(rng), uniform01(rng)};
}

}  // namespace

TEST_CASE("dijkstra routes equal simple-path enumeration") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        GeneratorParams g;
        g.n_parts = 3;
        g.n_sites = 3 + static_cast<int>(seed % 3);
        g.n_warehouses = 2;
        g.edge_density = 0.5;
        g.seed = seed;
        g.ws_slack = 100;
        const ProblemInstance inst = generate_synthetic(g);
        Rng rng(seed);
        const auto w = random_weights(rng);
        const KpiScales sc = kpi_scales(inst);
        for (std::size_t i = 0; i < inst.part_count(); ++i) {
            const auto routes = optimal_routes(inst, i, w, sc);
            for (std::size_t k = 0; k < inst.site_count(); ++k) {
                for (std::size_t l = 0; l < inst.site_count(); ++l) {
                    const auto& r = routes[k * inst.site_count() + l];
                    const auto o = best_path(inst, i, k, l, w);
                    REQUIRE(r.has_value() == o.has_value());
                    if (!r) {
                        continue;
                    }
                    CHECK(r->cost == Catch::Approx(o->cost).epsilon(1e-12).margin(1e-15));
                    for (int n = 0; n < 3; ++n) {
                        CHECK(r->contribution[n] == Catch::Approx(o->contribution[n]).epsilon(1e-12).margin(1e-15));
                    }
                }
            }
        }
    }
}

TEST_CASE("a route from a site to itself is empty") {
    const ProblemInstance inst(chain_data());
    const KpiScales sc = kpi_scales(inst);
    const auto routes = optimal_routes(inst, 1, {1.0, 0.0, 0.0}, sc);
    for (std::size_t k = 0; k < inst.site_count(); ++k) {
        const auto& r = routes[k * inst.site_count() + k];
        REQUIRE(r.has_value());
        CHECK(r->methods.empty());
        CHECK(r->cost == 0.0);
    }
}

TEST_CASE("chain instance routes through the warehouse when it is cheaper") {
    const ProblemInstance inst(chain_data());
    const KpiScales sc = kpi_scales(inst);
    const std::size_t p1 = inst.part_index("P1");
    const auto routes = optimal_routes(inst, p1, {1.0, 0.0, 0.0}, sc);
    const auto& r = routes[inst.site_index("K2") * inst.site_count() + inst.site_index("K0")];
    REQUIRE(r.has_value());
    REQUIRE(r->methods.size() == 2);  // M2 then M3
    const auto o = best_path(inst, p1, inst.site_index("K2"), inst.site_index("K0"), {1.0, 0.0, 0.0});
    CHECK(r->cost == Catch::Approx(o->cost));
    CHECK_FALSE(routes[inst.site_index("K0") * inst.site_count() + inst.site_index("K2")].has_value());
}

TEST_CASE("scales fall back to one without transport") {
    InstanceData d = chain_data();
    d.transport.clear();
    const ProblemInstance inst(d);
    const KpiScales sc = kpi_scales(inst);
    CHECK(sc.d[0] == 1.0);
    CHECK(sc.d[1] == 1.0);
    CHECK(sc.d[2] == 1.0);
    CHECK(sc.d[3] == 100.0);
}

TEST_CASE("reachability agrees with path enumeration") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const ProblemInstance inst = generate_synthetic(tiny_params(seed, 4));
        for (std::size_t i = 0; i < inst.part_count(); ++i) {
            const auto reach = site_reachability(inst, i);
            for (std::size_t k = 0; k < inst.site_count(); ++k) {
                for (std::size_t l = 0; l < inst.site_count(); ++l) {
                    CHECK(reach[k][l] == best_path(inst, i, k, l, {1.0, 1.0, 1.0}).has_value());
                }
            }
        }
    }
}

TEST_CASE("reduced sets are the order-independent greatest fixed point") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        GeneratorParams g;
        g.n_parts = 6;
        g.seed = seed;
        g.edge_density = 0.3;
        const ProblemInstance inst = generate_synthetic(g);
        std::vector<std::vector<std::vector<bool>>> reach;
        for (std::size_t i = 0; i < inst.part_count(); ++i) {
            reach.push_back(site_reachability(inst, i));
        }
        const auto gset = feasibility_reduction(inst, reach);
        std::vector<std::size_t> rank(inst.site_count());
        std::iota(rank.rbegin(), rank.rend(), 0);
        CHECK(feasibility_reduction(inst, reach, &rank) == gset);

        // every kept option has a partner at the parent and at every child
        for (std::size_t i = 0; i < inst.part_count(); ++i) {
            for (std::size_t o : gset[i]) {
                const std::size_t k = inst.options(i)[o].site;
                if (i != inst.root()) {
                    const std::size_t p = inst.parent(i);
                    CHECK(std::any_of(gset[p].begin(), gset[p].end(),
                                      [&](std::size_t q) { return reach[i][k][inst.options(p)[q].site]; }));
                }
                for (std::size_t c : inst.children(i)) {
                    CHECK(std::any_of(gset[c].begin(), gset[c].end(),
                                      [&](std::size_t q) { return reach[c][inst.options(c)[q].site][k]; }));
                }
            }
        }
        // the planted assignment of the generator survives the reduction
        for (std::size_t i = 0; i < inst.part_count(); ++i) {
            CHECK_FALSE(gset[i].empty());
        }
    }
}

TEST_CASE("unsupported parts make the instance infeasible") {
    InstanceData d = chain_data();
    // without transport P2 cannot reach P1's only site
    d.transport.erase(std::remove_if(d.transport.begin(), d.transport.end(),
                                     [](const TransportMethod& m) { return m.part == "P2"; }),
                      d.transport.end());
    d.feasible = {{"P0", "K0", "U0", 0.0}, {"P1", "K0", "U0", 0.0}, {"P2", "K1", "U1", 0.0}};
    auto inst = std::make_shared<const ProblemInstance>(d);
    CHECK_THROWS_AS(ReducedInstance::build(inst), InfeasibleInstanceError);
}

TEST_CASE("nearest numerator rounds half to even") {
    CHECK(nearest_numerator(0.25, 10) == 2);
    CHECK(nearest_numerator(0.35, 10) == 4);
    CHECK(nearest_numerator(0.5, 5) == 2);
    CHECK(nearest_numerator(0.7, 5) == 4);
    CHECK(nearest_numerator(0.123, 100) == 12);
}

TEST_CASE("rational approximation error is bounded by half a step") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GeneratorParams g;
        g.n_parts = 12;
        g.seed = seed;
        g.alpha = 0.5 + 0.025 * static_cast<double>(seed % 13);
        const ProblemInstance inst = generate_synthetic(g);
        const RationalApprox ra = rational_approx(inst, 10, 5);
        for (std::size_t i = 0; i < inst.part_count(); ++i) {
            const double v = inst.relative_value(i);
            CHECK(std::abs(v - static_cast<double>(ra.P[i]) / 10.0) <= 0.05 + 1e-12);
            CHECK(ra.P_bar[i] >= 3);
            CHECK(ra.P_bar[i] <= 5);
            CHECK(ra.share_numerator(i, 0) + ra.share_numerator(i, 1) == 5);
        }
        CHECK(ra.max_value_error() <= 0.05 + 1e-12);
    }
}
