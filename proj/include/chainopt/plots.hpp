#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chainopt/pareto.hpp"

namespace chainopt {

/// Scatter of components a and b (1-based). Overall Pareto points are filled, points that are only
/// optimal in this projection are squares, dominated points are hollow.
std::string kpi_scatter_svg(const std::vector<Kpi4>& points, int a, int b);

/// Bars of achieved workshare per site and supplier with window and target markers,
/// from the JSON written for each solution of a sweep.
std::string workshare_svg(const std::string& solution_json, const std::string& title);

/// Reads results.csv (a file or the sweep directory holding it) and writes kpi_cA_cB.svg for the six
/// component pairs plus workshare_<run_id>.svg for each solution file found next to it.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& results,
                                              const std::filesystem::path& out_dir);

}  // namespace chainopt
