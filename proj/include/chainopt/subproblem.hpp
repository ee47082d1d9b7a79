#pragma once

#include <cstddef>
#include <vector>

#include "chainopt/model.hpp"
#include "chainopt/solvers.hpp"

namespace chainopt {

/// Restriction of Q to selected variables with all others clamped to x. Clamped terms are folded into
/// the linear part and the offset, so the sub-energy equals Q(x) for every setting of the selection.
struct SubProblem {
    std::vector<std::size_t> vars;  // global index of each local variable
    GroupedProblem problem;         // one-hot groups from the layout, restricted to the selection
};

SubProblem build_subproblem(const Qubo& q, const BitVector& x, const std::vector<std::size_t>& selected,
                            const VariableLayout* layout = nullptr);

/// Local sub-problem values of x.
BitVector restrict_to(const SubProblem& sub, const BitVector& x);
/// x with the selected variables replaced by a sub-problem solution.
BitVector merge_subsolution(const SubProblem& sub, BitVector x, const BitVector& local);

}  // namespace chainopt
