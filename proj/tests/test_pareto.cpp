#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>

#include "chainopt/pareto.hpp"
#include "chainopt/util.hpp"
#include "test_support.hpp"

using namespace chainopt;
using namespace chainopt::testing;

namespace {

std::vector<Kpi4> random_points(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Kpi4> pts(n);
    for (auto& p : pts) {
        for (int d = 0; d < 4; ++d) {
            p[d] = kDefaultReference[d] * (0.1 + 0.9 * uniform01(rng));
        }
    }
    return pts;
}

}  // namespace

TEST_CASE("single point box volume") {
    CHECK(hypervolume({{1.0, 1.0, 1.0, 1.0}}) == 126.0);
    CHECK(hypervolume({{0.0, 0.0, 0.0, 0.0}}) == 3.0 * 5.0 * 4.5 * 5.5);
}

TEST_CASE("dominated points add nothing") {
    const std::vector<Kpi4> a{{1.0, 1.0, 1.0, 1.0}};
    const std::vector<Kpi4> b{{1.0, 1.0, 1.0, 1.0}, {2.0, 2.0, 2.0, 2.0}, {1.0, 1.0, 1.0, 1.0}};
    CHECK(hypervolume(b) == hypervolume(a));
}

TEST_CASE("two boxes by inclusion and exclusion") {
    const std::vector<Kpi4> pts{{1.0, 2.0, 1.0, 1.0}, {2.0, 1.0, 1.0, 1.0}};
    const double box1 = 2.0 * 3.0 * 3.5 * 4.5;
    const double box2 = 1.0 * 4.0 * 3.5 * 4.5;
    const double both = 1.0 * 3.0 * 3.5 * 4.5;
    CHECK(hypervolume(pts) == Catch::Approx(box1 + box2 - both).epsilon(1e-14));
}

TEST_CASE("points outside the reference box are excluded and counted") {
    std::size_t excluded = 0;
    const double hv = hypervolume({{1.0, 1.0, 1.0, 1.0}, {4.0, 1.0, 1.0, 1.0}, {1.0, 5.0, 1.0, 1.0}}, kDefaultReference,
                                  &excluded);
    CHECK(hv == 126.0);
    CHECK(excluded == 2);
}

TEST_CASE("exact volume agrees with Monte-Carlo") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto pts = random_points(15, seed);
        const double exact = hypervolume(pts);
        const double mc = mc_hypervolume(pts, kDefaultReference, 1'000'000, seed + 10);
        CHECK(std::abs(exact - mc) <= 0.02 * exact);
    }
}

TEST_CASE("volume is monotone and invariant under order") {
    auto pts = random_points(25, 7);
    double prev = 0.0;
    std::vector<Kpi4> grow;
    for (const auto& p : pts) {
        grow.push_back(p);
        const double hv = hypervolume(grow);
        CHECK(hv >= prev - 1e-12);
        prev = hv;
    }
    Rng rng(3);
    shuffle(pts, rng);
    CHECK(hypervolume(pts) == Catch::Approx(prev).epsilon(1e-12));
}

TEST_CASE("pareto filter agrees with pairwise comparison") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto pts = random_points(40, seed);
        pts.push_back(pts[3]);  // duplicate
        auto front = pareto_filter(pts);
        std::sort(front.begin(), front.end());
        auto expected = pairwise_pareto(pts);
        std::sort(expected.begin(), expected.end());
        CHECK(front == expected);

        std::vector<Kpi4> sub;
        for (std::size_t i : front) {
            sub.push_back(pts[i]);
        }
        CHECK(pareto_filter(sub).size() == sub.size());
        CHECK(hypervolume(sub) == Catch::Approx(hypervolume(pts)).epsilon(1e-12));
    }
}

TEST_CASE("projected front on two components") {
    const std::vector<Kpi4> pts{{1.0, 9.0, 3.0, 0.0}, {2.0, 1.0, 0.0, 0.0}, {3.0, 3.0, 0.0, 0.0}};
    auto p12 = projected_pareto(pts, 1, 2);
    std::sort(p12.begin(), p12.end());
    CHECK(p12 == std::vector<std::size_t>{0, 1});
    auto p34 = projected_pareto(pts, 3, 4);
    std::sort(p34.begin(), p34.end());
    CHECK(p34 == std::vector<std::size_t>{1, 2});  // equal projections are all kept
}

TEST_CASE("kpi csv round trip keeps feasible rows") {
    std::vector<KpiPoint> pts{{{1.0, 2.0, 3.0, 4.0}, {0.25, 0.25, 0.25, 0.25}, "a", true},
                              {{0.5, 0.5, 0.5, 0.5}, {1.0, 0.0, 0.0, 0.0}, "b", false}};
    const auto path = std::filesystem::temp_directory_path() / "chainopt_kpi_roundtrip.csv";
    write_file(path, kpi_csv(pts));
    const auto back = read_kpi_csv(path);
    REQUIRE(back.size() == 1);
    CHECK(back[0].c == pts[0].c);
    CHECK(back[0].w == pts[0].w);
    CHECK(back[0].solution_id == "a");
    std::filesystem::remove(path);
}
