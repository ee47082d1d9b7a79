#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chainopt/das.hpp"
#include "chainopt/util.hpp"

using namespace chainopt;

namespace {

std::vector<DasParam> box(int dim) {
    std::vector<DasParam> space;
    for (int d = 0; d < dim; ++d) {
        space.push_back({"x" + std::to_string(d), -10.0, 10.0, 0.0, 1.0, false, false});
    }
    return space;
}

double run_quadratic(std::uint64_t seed, int steps, const Eigen::VectorXd& target) {
    DasConfig cfg;
    cfg.seed = seed;
    DasState st(box(static_cast<int>(target.size())), cfg);
    for (int s = 0; s < steps; ++s) {
        const auto draws = das_sample(st);
        std::vector<double> costs;
        for (const auto& d : draws) {
            costs.push_back((d.point - target).squaredNorm());
        }
        das_update(st, draws, costs);
    }
    return (st.theta() - target).norm();
}

}  // namespace

TEST_CASE("das shrinks the distance to a quadratic optimum") {
    Eigen::VectorXd target(4);
    target << 1.5, -0.7, 2.0, 0.3;
    const double start = target.norm();
    int good = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        good += run_quadratic(seed, 200, target) * 10.0 <= start;
    }
    CHECK(good >= 9);
}

TEST_CASE("das draws depend only on seed and step") {
    DasConfig cfg;
    cfg.seed = 5;
    DasState st(box(3), cfg);
    const auto a = das_sample(st);
    const auto b = das_sample(st);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].eps == b[i].eps);
    }
    // antithetic pairs
    CHECK((a[0].eps + a[1].eps).norm() == 0.0);
}

TEST_CASE("das keeps the factor lower triangular with positive diagonal") {
    DasConfig cfg;
    cfg.seed = 2;
    DasState st(box(3), cfg);
    Rng rng(1);
    for (int s = 0; s < 50; ++s) {
        const auto draws = das_sample(st);
        std::vector<double> costs;
        for (std::size_t i = 0; i < draws.size(); ++i) {
            costs.push_back(uniform01(rng));
        }
        das_update(st, draws, costs);
        for (int i = 0; i < 3; ++i) {
            CHECK(st.L()(i, i) > 0.0);
            for (int j = i + 1; j < 3; ++j) {
                CHECK(st.L()(i, j) == 0.0);
            }
        }
    }
    CHECK(st.step() == 50);
}

TEST_CASE("parameters map through log scale, rounding and bounds") {
    std::vector<DasParam> space{{"beta", 1.0, 100.0, 10.0, 0.5, true, false},
                                {"T", 10.0, 50.0, 20.0, 2.0, false, true}};
    DasState st(space, {});
    const auto p = st.params();
    CHECK(p[0] == Catch::Approx(10.0));
    CHECK(p[1] == 20.0);
    Eigen::VectorXd far(2);
    far << 100.0, 12.4;
    const auto q = st.to_params(st.clamp(far));
    CHECK(q[0] == Catch::Approx(100.0));
    CHECK(q[1] == 12.0);
}

TEST_CASE("equal costs leave the mean in place") {
    DasConfig cfg;
    cfg.seed = 9;
    DasState st(box(2), cfg);
    const Eigen::VectorXd before = st.theta();
    const auto draws = das_sample(st);
    das_update(st, draws, std::vector<double>(draws.size(), 1.0));
    CHECK((st.theta() - before).norm() == Catch::Approx(0.0).margin(1e-15));
}
