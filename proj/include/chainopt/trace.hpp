#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chainopt/util.hpp"

namespace chainopt {

/// Objective per step and the best objective seen up to that step.
struct SolverTrace {
    std::vector<double> objective;
    std::vector<double> best;

    void record(double value) {
        objective.push_back(value);
        best.push_back(best.empty() || value < best.back() ? value : best.back());
    }

    std::string to_csv() const {
        std::string out = "step,objective,best_objective\n";
        for (std::size_t i = 0; i < objective.size(); ++i) {
            out += std::to_string(i) + ',' + format_double(objective[i]) + ',' + format_double(best[i]) + '\n';
        }
        return out;
    }
};

}  // namespace chainopt
