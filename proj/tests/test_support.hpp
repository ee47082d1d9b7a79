#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chainopt/assignment.hpp"
#include "chainopt/generator.hpp"
#include "chainopt/model.hpp"
#include "chainopt/pareto.hpp"
#include "chainopt/preprocess.hpp"

namespace chainopt::testing {

// ---- builders ----

/// Three parts in a chain, three sites in two regions, one warehouse, two suppliers.
InstanceData chain_data();

/// Small generated instance with wide windows.
GeneratorParams tiny_params(std::uint64_t seed, int parts);

std::shared_ptr<const QuboModel> build_model(const ProblemInstance& inst, const Weights& w = {},
                                             const Multipliers& m = {}, const CompileOptions& o = {});

/// Instances whose compiled model (window penalties off) has between lo and hi variables.
std::vector<std::shared_ptr<const QuboModel>> oracle_models(std::size_t count, std::size_t lo, std::size_t hi,
                                                            std::uint64_t first_seed = 1);

Qubo random_qubo(std::size_t n, double density, std::uint64_t seed, double scale = 1.0);
/// Random spanning tree over n variables with U[-1, 1] coefficients.
Qubo random_tree_qubo(std::size_t n, std::uint64_t seed);

// ---- oracles ----

/// Energy straight from the coefficient lists.
double naive_energy(const Qubo& q, const BitVector& x);
/// Minimum by plain enumeration of all 2^n states.
double exhaustive_min(const Qubo& q);

struct PathOracle {
    double cost = 0.0;
    std::array<double, 3> contribution{};
};

/// Cheapest simple path between two sites for a part by depth-first enumeration, costs recomputed from
/// the raw instance data. Nothing when unreachable; the empty path when from == to.
std::optional<PathOracle> best_path(const ProblemInstance& inst, std::size_t part, std::size_t from,
                                    std::size_t to, const std::array<double, 3>& w);

/// PBS levels by recursion from the root.
std::map<std::string, int> recursive_levels(const InstanceData& data);

struct ChoiceOptimum {
    double objective = 0.0;
    Choice choice;
    std::size_t feasible = 0;  // feasible choices seen
};

/// Σ w_n C_n of a complete choice, with transport costs taken from best_path.
double oracle_objective(const QuboModel& model, const Choice& choice);

/// Minimum over every choice that passes check_assignment.
ChoiceOptimum enumerate_feasible(const QuboModel& model);

double mc_hypervolume(const std::vector<Kpi4>& points, const Kpi4& ref, std::size_t samples, std::uint64_t seed);

/// O(n²) non-domination with duplicates kept once.
std::vector<std::size_t> pairwise_pareto(const std::vector<Kpi4>& points);

}  // namespace chainopt::testing
