#include <catch2/catch_amalgamated.hpp>

#include "chainopt/generator.hpp"
#include "chainopt/instance.hpp"
#include "test_support.hpp"

using namespace chainopt;
using namespace chainopt::testing;

TEST_CASE("chain instance indexes parts, sites and methods") {
    const ProblemInstance inst(chain_data());
    CHECK(inst.part_count() == 3);
    CHECK(inst.site_count() == 3);
    CHECK(inst.node_count() == 4);
    CHECK(inst.root() == inst.part_index("P0"));
    CHECK(inst.parent(inst.part_index("P2")) == inst.part_index("P1"));
    CHECK(inst.level(inst.part_index("P2")) == 2);
    CHECK(inst.node_index("W0") == 3);
    CHECK(inst.node_id(3) == "W0");
    CHECK(inst.site_region(inst.site_index("K2")) == inst.site_region(inst.site_index("K0")));
    CHECK(inst.methods_of_part(inst.part_index("P1")).size() == 6);
    CHECK(inst.options(inst.part_index("P0")).size() == 2);
}

TEST_CASE("relative values sum to one hundred") {
    const ProblemInstance inst(chain_data());
    double sum = 0.0;
    for (std::size_t i = 0; i < inst.part_count(); ++i) {
        sum += inst.relative_value(i);
    }
    CHECK(sum == Catch::Approx(100.0).epsilon(1e-12));
    CHECK(inst.relative_value(0) == Catch::Approx(100.0 * 10.0 / 18.0));
}

TEST_CASE("levels match a recursive walk from the root") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        GeneratorParams g;
        g.n_parts = 5 + static_cast<int>(seed % 9);
        g.seed = seed;
        g.max_depth = 1 + static_cast<int>(seed % 5);
        const ProblemInstance inst = generate_synthetic(g);
        const auto expected = recursive_levels(inst.data());
        CHECK(part_levels(inst.data()) == expected);
        for (std::size_t i = 0; i < inst.part_count(); ++i) {
            CHECK(inst.level(i) == expected.at(inst.part(i).id));
            if (i != inst.root()) {
                CHECK(inst.level(i) == inst.level(inst.parent(i)) + 1);
            }
        }
    }
}

TEST_CASE("json round trip preserves the instance") {
    const ProblemInstance inst = generate_synthetic(tiny_params(3, 5));
    const ProblemInstance back = parse_instance(instance_to_json(inst.data()));
    CHECK(back == inst);
}

TEST_CASE("malformed instances are rejected") {
    SECTION("cycle") {
        InstanceData d = chain_data();
        d.parts[0].parent = "P2";
        CHECK_THROWS_AS(ProblemInstance(d), StructureError);
    }
    SECTION("two roots") {
        InstanceData d = chain_data();
        d.parts[2].parent.reset();
        CHECK_THROWS_AS(ProblemInstance(d), StructureError);
    }
    SECTION("unknown site in a feasible option") {
        InstanceData d = chain_data();
        d.feasible.push_back({"P0", "K9", "U0", 0.0});
        CHECK_THROWS_AS(ProblemInstance(d), InstanceError);
    }
    SECTION("syntax error names a line") {
        CHECK_THROWS_WITH(parse_instance("{\n\"parts\": [\n,]}"), Catch::Matchers::ContainsSubstring("line"));
    }
}

TEST_CASE("generator is deterministic in its seed") {
    const ProblemInstance a = generate_synthetic(tiny_params(11, 6));
    const ProblemInstance b = generate_synthetic(tiny_params(11, 6));
    const ProblemInstance c = generate_synthetic(tiny_params(12, 6));
    CHECK(a == b);
    CHECK_FALSE(a == c);
}
