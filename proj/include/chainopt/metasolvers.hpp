#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chainopt/das.hpp"
#include "chainopt/informed.hpp"
#include "chainopt/solvers.hpp"

namespace chainopt {

// ---- iterative QAOA tree search ----

enum class SubSolver { Qaoa, Sa, BruteForce };

const char* sub_solver_name(SubSolver s);
SubSolver parse_sub_solver(const std::string& name);

struct IqtsConfig {
    int m = 4;          // parts per sampled subtree
    int n = 15;         // variable budget per sub-problem
    int kappa = 50;     // repetitions over all parts
    SubSolver sub_solver = SubSolver::Qaoa;
    int isf_budget = 20;
    int isi_iterations = 10;
    double isi_stop_prob = 0.5;
    bool literal_zero = false;  // clamp every unselected variable to zero instead of the incumbent
    QaoaParams qaoa;
    SaParams sa;
    std::uint64_t seed = 0;
};

struct IqtsTraceRow {
    int repetition = 0;
    std::size_t part = 0;
    double candidate = 0.0;  // objective of the repaired candidate, NaN when repair failed
    double incumbent = 0.0;
    bool accepted = false;
    bool fallback = false;   // sub-solver failed and annealing took over
};

struct IqtsResult {
    Solution best;
    std::vector<IqtsTraceRow> trace;
    int fallbacks = 0;
};

IqtsResult iqts_solve(const QuboModel& model, const IqtsConfig& config);
std::string iqts_trace_csv(const IqtsResult& r);

// ---- hybrid Bayesian solver ----

enum class HbsSolver { Cacm, Ibp, Qaoa };

const char* hbs_solver_name(HbsSolver s);
HbsSolver parse_hbs_solver(const std::string& name);

struct HbsConfig {
    std::vector<HbsSolver> solvers{HbsSolver::Cacm, HbsSolver::Ibp};
    int population = 8;
    int max_iterations = 250;
    int convergence_window = 25;   // stop after this many iterations without a better incumbent
    int isf_budget = 20;
    int ibp_sweeps = 5;
    std::size_t qaoa_qubits = 12;  // sub-problem size for the QAOA solver
    DasConfig das{4, 0.5, 0.2, 0.0, 0.0, 0.0, 0};
    QaoaParams qaoa;
    std::uint64_t seed = 0;
    std::size_t threads = 1;       // 0: use all workers
};

/// Search space of a solver's hyperparameters (empty for QAOA).
std::vector<DasParam> hbs_search_space(HbsSolver s);

struct HbsTraceRow {
    int iteration = 0;
    double best_candidate = 0.0;  // lowest energy among solver outputs before repair
    double incumbent = 0.0;       // best feasible objective so far
    double target = 0.0;          // H*
    bool skipped = false;         // every solver failed this iteration
    std::vector<std::vector<double>> params;  // current mean parameters per solver
};

struct HbsResult {
    Solution best;
    std::vector<HbsTraceRow> trace;
    int iterations = 0;
};

HbsResult hbs_solve(const QuboModel& model, const HbsConfig& config);
std::string hbs_trace_csv(const HbsResult& r, const HbsConfig& config);

}  // namespace chainopt
