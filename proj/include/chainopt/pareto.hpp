#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace chainopt {

using Kpi4 = std::array<double, 4>;

constexpr Kpi4 kDefaultReference{3.0, 5.0, 4.5, 5.5};

struct KpiPoint {
    Kpi4 c{};
    std::array<double, 4> w{};
    std::string solution_id;
    bool feasible = true;
};

/// Indices of non-dominated points (minimization); of several identical points only the first is kept.
std::vector<std::size_t> pareto_filter(const std::vector<Kpi4>& points);

/// Non-domination on two components, numbered 1..4; points with equal projections are all kept.
std::vector<std::size_t> projected_pareto(const std::vector<Kpi4>& points, int dim_a, int dim_b);

/// Exact measure of the union of boxes [p, reference]. Points not strictly below the reference in every
/// component are ignored and counted in `excluded`.
double hypervolume(const std::vector<Kpi4>& points, const Kpi4& reference = kDefaultReference,
                   std::size_t* excluded = nullptr);

/// CSV with columns w1..w4, c1..c4, solution_id, feasible.
std::vector<KpiPoint> read_kpi_csv(const std::filesystem::path& path);
std::string kpi_csv(const std::vector<KpiPoint>& points);

}  // namespace chainopt
