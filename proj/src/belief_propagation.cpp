#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "chainopt/solvers.hpp"
#include "chainopt/util.hpp"

namespace chainopt {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

using Log2 = std::array<double, 2>;

double logsumexp(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

Log2 normalized(Log2 v) {
    const double z = logsumexp(v[0], v[1]);
    return {v[0] - z, v[1] - z};
}

/// Converged sum-product messages on one induced tree, in the log domain.
struct TreeBp {
    std::vector<Log2> theta;                  // unary, boundary folded in
    std::vector<double> coupling;             // b between node and its tree parent
    std::vector<std::vector<std::size_t>> children;
    std::vector<Log2> up;                     // node -> parent, function of the parent's value
    std::vector<Log2> down;                   // parent -> node, function of the node's value
    double max_normalization_error = 0.0;
    int iterations = 0;
};

TreeBp run_tree_bp(const Qubo& q, const TreeSample& tree, const BitVector& x, double beta, double damping,
                   int max_iterations, double tolerance) {
    const std::size_t m = tree.vars.size();
    TreeBp bp;
    bp.theta.assign(m, {0.0, 0.0});
    bp.coupling.assign(m, 0.0);
    bp.children.assign(m, {});
    std::unordered_map<std::size_t, std::size_t> pos;
    for (std::size_t p = 0; p < m; ++p) {
        pos.emplace(tree.vars[p], p);
    }
    for (std::size_t p = 0; p < m; ++p) {
        const std::size_t v = tree.vars[p];
        double field = q.linear()[v];
        for (const Neighbor& nb : q.neighbors(v)) {
            auto it = pos.find(nb.index);
            if (it == pos.end()) {
                field += nb.value * x[nb.index];
            } else if (p != 0 && it->second == tree.parent[p]) {
                bp.coupling[p] = nb.value;
            }
        }
        bp.theta[p] = {0.0, -beta * field};
        if (p != 0) {
            bp.children[tree.parent[p]].push_back(p);
        }
    }
    const Log2 uniform{std::log(0.5), std::log(0.5)};
    bp.up.assign(m, uniform);
    bp.down.assign(m, uniform);
    std::vector<Log2> incoming(m), new_up(m), new_down(m);
    auto psi = [&](std::size_t p, int a, int b) { return -beta * bp.coupling[p] * a * b; };
    for (int it = 0; it < max_iterations; ++it) {
        for (std::size_t p = 0; p < m; ++p) {
            incoming[p] = p == 0 ? Log2{0.0, 0.0} : bp.down[p];
        }
        for (std::size_t p = 1; p < m; ++p) {
            for (int b = 0; b < 2; ++b) {
                incoming[tree.parent[p]][b] += bp.up[p][b];
            }
        }
        for (std::size_t p = 1; p < m; ++p) {
            const std::size_t par = tree.parent[p];
            Log2 u{}, d{};
            for (int bo = 0; bo < 2; ++bo) {
                // message to the parent excludes what came from it
                const double from_p0 = bp.theta[p][0] + incoming[p][0] - bp.down[p][0] + psi(p, 0, bo);
                const double from_p1 = bp.theta[p][1] + incoming[p][1] - bp.down[p][1] + psi(p, 1, bo);
                u[bo] = logsumexp(from_p0, from_p1);
                const double from_q0 = bp.theta[par][0] + incoming[par][0] - bp.up[p][0] + psi(p, bo, 0);
                const double from_q1 = bp.theta[par][1] + incoming[par][1] - bp.up[p][1] + psi(p, bo, 1);
                d[bo] = logsumexp(from_q0, from_q1);
            }
            new_up[p] = normalized(u);
            new_down[p] = normalized(d);
        }
        double change = 0.0;
        auto damp = [&](Log2& old, const Log2& fresh) {
            Log2 mixed{};
            for (int b = 0; b < 2; ++b) {
                const double prob = (1.0 - damping) * std::exp(fresh[b]) + damping * std::exp(old[b]);
                change = std::max(change, std::abs(prob - std::exp(old[b])));
                mixed[b] = std::log(prob);
            }
            const double err = std::abs(std::exp(mixed[0]) + std::exp(mixed[1]) - 1.0);
            bp.max_normalization_error = std::max(bp.max_normalization_error, err);
            old = mixed;
        };
        for (std::size_t p = 1; p < m; ++p) {
            damp(bp.up[p], new_up[p]);
            damp(bp.down[p], new_down[p]);
        }
        bp.iterations = it + 1;
        if (change < tolerance) {
            break;
        }
    }
    return bp;
}

/// Σ of messages arriving from the children of p.
Log2 from_children(const TreeBp& bp, std::size_t p) {
    Log2 acc{0.0, 0.0};
    for (std::size_t c : bp.children[p]) {
        acc[0] += bp.up[c][0];
        acc[1] += bp.up[c][1];
    }
    return acc;
}

}  // namespace

TreeSample sample_tree(const Qubo& q, std::size_t root, std::size_t budget, std::uint64_t seed,
                       const std::vector<bool>* excluded) {
    const std::size_t n = q.size();
    if (root >= n) {
        throw SolverError("tree root outside the model");
    }
    if (budget == 0) {
        budget = n;
    }
    Rng rng(seed);
    TreeSample tree;
    std::vector<std::size_t> position(n, npos);
    std::vector<int> tree_neighbors(n, 0);
    std::vector<std::size_t> candidates;
    auto add = [&](std::size_t v, std::size_t parent_pos) {
        position[v] = tree.vars.size();
        tree.vars.push_back(v);
        tree.parent.push_back(parent_pos);
        for (const Neighbor& nb : q.neighbors(v)) {
            if (++tree_neighbors[nb.index] == 1 && position[nb.index] == npos) {
                candidates.push_back(nb.index);
            }
        }
    };
    add(root, npos);
    while (tree.vars.size() < budget && !candidates.empty()) {
        const std::size_t pick = uniform_index(rng, candidates.size());
        const std::size_t v = candidates[pick];
        candidates[pick] = candidates.back();
        candidates.pop_back();
        if (position[v] != npos || tree_neighbors[v] != 1 || (excluded && (*excluded)[v])) {
            continue;
        }
        std::size_t parent_pos = npos;
        for (const Neighbor& nb : q.neighbors(v)) {
            if (position[nb.index] != npos) {
                parent_pos = position[nb.index];
            }
        }
        add(v, parent_pos);
    }
    return tree;
}

TreeMarginals tree_marginals(const Qubo& q, const TreeSample& tree, const BitVector& x, double beta, double damping,
                             int max_iterations, double tolerance) {
    const TreeBp bp = run_tree_bp(q, tree, x, beta, damping, max_iterations, tolerance);
    TreeMarginals out;
    out.max_normalization_error = bp.max_normalization_error;
    out.iterations = bp.iterations;
    for (std::size_t p = 0; p < tree.vars.size(); ++p) {
        Log2 b = from_children(bp, p);
        for (int v = 0; v < 2; ++v) {
            b[v] += bp.theta[p][v] + (p == 0 ? 0.0 : bp.down[p][v]);
        }
        b = normalized(b);
        out.marginal.push_back({std::exp(b[0]), std::exp(b[1])});
    }
    return out;
}

BitResult ibp_solve(const Qubo& q, const IbpParams& params, const BitVector& initial) {
    const std::size_t n = q.size();
    if (initial.size() != n) {
        throw SolverError("initial state length does not match the model");
    }
    if (params.beta <= 0.0 || params.damping < 0.0 || params.damping >= 1.0) {
        throw SolverError("belief propagation needs beta > 0 and damping in [0, 1)");
    }
    BitResult res;
    res.x = initial;
    res.energy = q.energy(initial);
    if (n == 0) {
        return res;
    }
    Rng rng(params.seed);
    BitVector x = initial;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int sweep = 0; sweep < params.sweeps; ++sweep) {
        std::vector<bool> covered(n, false);
        shuffle(order, rng);
        for (std::size_t root : order) {
            if (covered[root]) {
                continue;
            }
            const TreeSample tree = sample_tree(q, root, params.tree_size, rng());
            const TreeBp bp = run_tree_bp(q, tree, x, params.beta, params.damping, params.max_message_iterations,
                                          params.tolerance);
            // forward sampling: parents precede children in insertion order
            for (std::size_t p = 0; p < tree.vars.size(); ++p) {
                Log2 w = from_children(bp, p);
                for (int b = 0; b < 2; ++b) {
                    w[b] += bp.theta[p][b];
                    if (p != 0) {
                        w[b] += -params.beta * bp.coupling[p] * b * x[tree.vars[tree.parent[p]]];
                    }
                }
                w = normalized(w);
                x[tree.vars[p]] = uniform01(rng) < std::exp(w[1]) ? 1 : 0;
                covered[tree.vars[p]] = true;
            }
        }
        const double e = q.energy(x);
        res.trace.record(e);
        if (e < res.energy) {
            res.energy = e;
            res.x = x;
        }
    }
    return res;
}

}  // namespace chainopt
