#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainopt/qubo_core.hpp"
#include "chainopt/trace.hpp"

namespace chainopt {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- exhaustive search ----

struct BruteForceResult {
    BitVector x;
    double energy = 0.0;
};

constexpr std::size_t kBruteForceCap = 26;

/// Global minimum of Q; ties resolve to the lexicographically smallest x.
/// `reverse_order` enumerates with the bit roles mirrored (same answer, different visiting order).
BruteForceResult brute_force(const Qubo& q, bool reverse_order = false);

// ---- simulated annealing ----

struct SaParams {
    int steps = 1000;            // single-spin Metropolis proposals
    double beta_initial = 0.1;
    double beta_final = 10.0;
    bool normalize = true;       // divide inverse temperatures by the largest row sum of the model
    std::uint64_t seed = 0;
};

struct SpinResult {
    SpinVector s;
    double energy = 0.0;
    SolverTrace trace;
    bool clamped = false;
};

SpinResult sa_solve(const Ising& ising, const SaParams& params, const SpinVector& initial);

// ---- iterative belief propagation ----

struct IbpParams {
    double beta = 20.0;
    int sweeps = 50;              // each sweep resamples every variable at least once
    double damping = 0.1;
    std::size_t tree_size = 0;    // 0: grow trees as large as possible
    int max_message_iterations = 500;
    double tolerance = 1e-12;
    std::uint64_t seed = 0;
};

struct BitResult {
    BitVector x;
    double energy = 0.0;
    SolverTrace trace;
};

/// Induced tree of the QUBO graph grown from `root`; each variable enters with exactly one tree neighbor.
/// Returned in insertion order with the tree parent of each entry (npos for the root).
struct TreeSample {
    std::vector<std::size_t> vars;
    std::vector<std::size_t> parent;  // position in vars, npos for the root
};

TreeSample sample_tree(const Qubo& q, std::size_t root, std::size_t budget, std::uint64_t seed,
                       const std::vector<bool>* excluded = nullptr);

struct TreeMarginals {
    std::vector<std::array<double, 2>> marginal;  // per tree variable, P(x=0), P(x=1)
    double max_normalization_error = 0.0;        // max |Σ_b μ(b) − 1| over all message updates
    int iterations = 0;
};

/// Conditional Boltzmann marginals e^{−βQ} of the tree variables with all others fixed to x.
TreeMarginals tree_marginals(const Qubo& q, const TreeSample& tree, const BitVector& x, double beta,
                             double damping, int max_iterations = 500, double tolerance = 1e-12);

BitResult ibp_solve(const Qubo& q, const IbpParams& params, const BitVector& initial);

// ---- chaotic amplitude control with momentum ----

struct CacmParams {
    double lambda1 = 1.0;   // λ at t = 0
    double lambda2 = -0.1;  // λ at t = T
    double gamma = 0.1;     // momentum
    double beta = 1.0;      // coupling strength
    double xi = 0.1;        // error-correction rate
    double a = 0.6;         // target amplitude
    int T = 1000;
    double dt = 0.05;
    double guard = 20.0;    // |u| clamp
    bool normalize = true;  // rescale the model by its largest row sum
    std::uint64_t seed = 0;
};

SpinResult cacm_solve(const Ising& ising, const CacmParams& params, const SpinVector& initial);

// ---- QAOA statevector simulation ----

struct QaoaParams {
    int p = 1;
    int shots = 1024;
    std::size_t max_qubits = 20;
    std::uint64_t seed = 0;
};

/// Sub-problem for QAOA: variables in `groups` are one-hot, the rest are free qubits.
struct GroupedProblem {
    Qubo qubo;
    std::vector<std::vector<std::size_t>> groups;
};

struct QaoaSample {
    BitVector x;
    int count = 0;
    double energy = 0.0;
};

struct QaoaResult {
    BitVector best;
    double best_energy = 0.0;
    std::vector<QaoaSample> samples;  // sorted by bitstring
    std::vector<double> gammas;
    std::vector<double> betas;
    double leakage = 0.0;  // probability outside the one-hot subspace before sampling
};

/// Linear-ramp angles: p = 1 gives (1/2, 1/2); otherwise γ_i = (i−1)/(p−1) and β_i = 1 − γ_i.
void qaoa_schedule(int p, std::vector<double>& gammas, std::vector<double>& betas);

constexpr double kLeakageTolerance = 1e-10;

QaoaResult qaoa_solve(const GroupedProblem& problem, const QaoaParams& params);

std::string qaoa_samples_csv(const QaoaResult& r);

}  // namespace chainopt
