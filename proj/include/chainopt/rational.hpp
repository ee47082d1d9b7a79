#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "chainopt/instance.hpp"

namespace chainopt {

/// Nearest integer numerator P of v ≈ P / denominator; halfway cases go to the even numerator.
std::int64_t nearest_numerator(double v, std::int64_t denominator);

/// Integer approximations of relative values v_i ≈ P_i / R and source shares α_i ≈ P̄_i / R̄.
struct RationalApprox {
    int R = 10;
    int R_bar = 5;
    std::vector<std::int64_t> P;
    std::vector<std::int64_t> P_bar;
    std::vector<double> eps;      // v_i − P_i / R
    std::vector<double> eps_bar;  // α_i − P̄_i / R̄

    /// D̄^a_i: P̄_i for the primary source (a = 0), R̄ − P̄_i for the secondary (a = 1).
    std::int64_t share_numerator(std::size_t part, int source) const {
        return source == 0 ? P_bar[part] : R_bar - P_bar[part];
    }
    /// Integer workshare contribution P_i·D̄^a_i, in units of 1/(R·R̄) percent.
    std::int64_t workshare(std::size_t part, int source) const { return P[part] * share_numerator(part, source); }
    /// Window bound K·R·R̄ for an integer percent K.
    std::int64_t scaled_bound(int percent) const { return static_cast<std::int64_t>(percent) * R * R_bar; }
    double max_value_error() const;
};

/// P̄_i is clamped to [ceil(R̄/2), R̄] so the represented share stays in [0.5, 1].
RationalApprox rational_approx(const ProblemInstance& instance, int R, int R_bar);

/// Same as above with every P̄_i fixed to a given numerator.
RationalApprox rational_approx_fixed_share(const ProblemInstance& instance, int R, int R_bar, std::int64_t P_bar);

}  // namespace chainopt
