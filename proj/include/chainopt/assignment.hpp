#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chainopt/model.hpp"

namespace chainopt {

/// Choice of reduced option (index into g_i) per part and source; npos when unassigned.
using Choice = std::vector<std::array<std::size_t, 2>>;

/// Working state of the informed heuristics: chosen options plus integer workshare accumulators.
class Assignment {
public:
    static constexpr std::size_t none = static_cast<std::size_t>(-1);

    explicit Assignment(const QuboModel& model);

    const QuboModel& model() const { return *model_; }
    std::size_t part_count() const { return choice_.size(); }

    std::size_t option(std::size_t part, int source) const { return choice_[part][source]; }
    bool assigned(std::size_t part, int source) const { return choice_[part][source] != none; }
    bool complete() const;
    const Choice& choice() const { return choice_; }

    std::size_t site(std::size_t part, int source) const;
    std::size_t supplier(std::size_t part, int source) const;

    /// Aliased parts keep both sources on the same option, so either source moves both.
    void assign(std::size_t part, int source, std::size_t option);
    void unassign(std::size_t part, int source);

    std::int64_t site_load(std::size_t k) const { return site_load_[k]; }
    std::int64_t supplier_load(std::size_t u) const { return supplier_load_[u]; }

    /// Assignment bits of x; ancillas left at zero.
    BitVector to_bits() const;

    bool operator==(const Assignment& o) const { return choice_ == o.choice_; }

private:
    void apply(std::size_t part, int source, std::size_t option, int sign);

    const QuboModel* model_;
    Choice choice_;
    std::vector<std::int64_t> site_load_;
    std::vector<std::int64_t> supplier_load_;
};

/// Exactly one set bit per one-hot group is required; returns false otherwise.
bool decode_strict(const QuboModel& model, const BitVector& x, Assignment& out);

struct FeasibilityReport {
    bool feasible = true;
    std::vector<std::string> violations;
};

/// Checks all six constraint families directly on the reduced instance; never consults the QUBO.
FeasibilityReport check_assignment(const ReducedInstance& reduced, const RationalApprox& rational,
                                   const Choice& choice);

/// Strict decoding through the layout followed by check_assignment.
FeasibilityReport check_solution(const QuboModel& model, const BitVector& x);

/// KPIs C_n of a complete assignment, scaled by d_n only.
std::array<double, 4> assignment_kpis(const QuboModel& model, const Assignment& a);
/// Σ w_n C_n; equals Q(x) for a feasible assignment with filled ancillas.
double assignment_objective(const QuboModel& model, const Assignment& a);

struct Solution {
    BitVector x;
    Evaluation eval;
};

Solution make_solution(const QuboModel& model, BitVector x);

/// Solution as JSON: assignment map per part plus a KPI block.
std::string solution_json(const QuboModel& model, const Solution& s);

}  // namespace chainopt
