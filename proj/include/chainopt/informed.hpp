#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "chainopt/assignment.hpp"
#include "chainopt/util.hpp"

namespace chainopt {

class GenerationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Whether `option` can be given to (part, source) without breaking a constraint against the
/// current assignment: distinct site/region, routes to assigned neighbors, and upper workshare bounds.
bool option_compatible(const Assignment& a, std::size_t part, int source, std::size_t option);

/// Every site and supplier meets its lower workshare bound.
bool lower_bounds_met(const Assignment& a);

/// Complete assignment to a solution with ancillas filled; throws if some window is violated.
Solution finalize(const Assignment& a);

/// Randomized feasible construction, root level first; restarts on dead ends.
Assignment isg_assignment(const QuboModel& model, Rng& rng, int max_restarts = 1000);
Solution isg(const QuboModel& model, Rng& rng, int max_restarts = 1000);

/// Reads x leniently: a group with several set bits keeps one at random, an empty group stays unassigned.
Assignment decode_lenient(const QuboModel& model, const BitVector& x, Rng& rng);

struct IsfResult {
    bool ok = false;
    Solution solution;  // valid only when ok
    int iterations = 0;
};

IsfResult isf(const QuboModel& model, const BitVector& x, int budget, Rng& rng);

struct IsiResult {
    Solution solution;
    double initial = 0.0;       // objective of the input, same evaluation as the trace
    std::vector<double> trace;  // objective after each iteration
    int accepted = 0;
};

IsiResult isi(const QuboModel& model, const BitVector& x, int iterations, double stop_prob, Rng& rng);

}  // namespace chainopt
