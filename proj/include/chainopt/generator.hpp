#pragma once

#include <cstdint>
#include <stdexcept>

#include "chainopt/instance.hpp"

namespace chainopt {

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GeneratorParams {
    int n_parts = 8;
    int n_sites = 4;
    int n_suppliers = 3;
    int n_warehouses = 2;
    int n_regions = 2;
    double edge_density = 0.5;
    double alpha = 0.8;
    std::uint64_t seed = 42;

    int max_depth = 4;
    int sites_per_part = 3;        // candidate sites per part (capped by n_sites)
    int suppliers_per_site = 1;    // suppliers offered with each candidate site
    double single_site_fraction = 0.0;  // probability that a non-root part gets a single candidate site
    int ws_slack = 10;             // percent added around the planted workshare
    int value_denominator = 10;    // R used when deriving windows from the planted solution
    int share_denominator = 5;     // R-bar used when deriving windows from the planted solution
};

/// Synthetic instance with a planted feasible assignment; deterministic in the seed.
ProblemInstance generate_synthetic(const GeneratorParams& params);

}  // namespace chainopt
