#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "chainopt/metasolvers.hpp"
#include "chainopt/subproblem.hpp"

namespace chainopt {

const char* sub_solver_name(SubSolver s) {
    switch (s) {
        case SubSolver::Qaoa: return "qaoa";
        case SubSolver::Sa: return "sa";
        case SubSolver::BruteForce: return "brute_force";
    }
    return "?";
}

SubSolver parse_sub_solver(const std::string& name) {
    if (name == "qaoa") return SubSolver::Qaoa;
    if (name == "sa") return SubSolver::Sa;
    if (name == "brute_force") return SubSolver::BruteForce;
    throw std::invalid_argument("unknown sub-solver '" + name + "' (expected qaoa, sa or brute_force)");
}

namespace {

/// Random connected set of up to m parts around `part` in the product breakdown tree.
std::vector<std::size_t> random_subtree(const ProblemInstance& inst, std::size_t part, int m, Rng& rng) {
    std::vector<std::size_t> tree{part}, frontier;
    std::vector<bool> seen(inst.part_count(), false);
    seen[part] = true;
    auto expand = [&](std::size_t p) {
        if (p != inst.root() && !seen[inst.parent(p)]) {
            seen[inst.parent(p)] = true;
            frontier.push_back(inst.parent(p));
        }
        for (std::size_t c : inst.children(p)) {
            if (!seen[c]) {
                seen[c] = true;
                frontier.push_back(c);
            }
        }
    };
    expand(part);
    while (static_cast<int>(tree.size()) < m && !frontier.empty()) {
        const std::size_t pick = uniform_index(rng, frontier.size());
        const std::size_t p = frontier[pick];
        frontier[pick] = frontier.back();
        frontier.pop_back();
        tree.push_back(p);
        expand(p);
    }
    return tree;
}

/// Whole one-hot groups of the subtree while they fit; the first group that does not fit contributes
/// its active variable plus random others up to the budget.
std::vector<std::size_t> select_variables(const QuboModel& model, const std::vector<std::size_t>& parts,
                                          const BitVector& x, int budget, Rng& rng) {
    const VariableLayout& lay = model.layout();
    std::vector<std::size_t> groups;
    for (std::size_t g = 0; g < lay.groups().size(); ++g) {
        if (std::find(parts.begin(), parts.end(), lay.group_key(g).first) != parts.end()) {
            groups.push_back(g);
        }
    }
    shuffle(groups, rng);
    std::vector<std::size_t> selected;
    for (std::size_t g : groups) {
        const auto& members = lay.groups()[g];
        const std::size_t room = static_cast<std::size_t>(budget) - selected.size();
        if (members.size() <= room) {
            selected.insert(selected.end(), members.begin(), members.end());
            continue;
        }
        if (room == 0) {
            break;
        }
        std::vector<std::size_t> rest;
        for (std::size_t v : members) {
            if (x[v] && selected.size() < static_cast<std::size_t>(budget)) {
                selected.push_back(v);
            } else {
                rest.push_back(v);
            }
        }
        shuffle(rest, rng);
        for (std::size_t v : rest) {
            if (selected.size() >= static_cast<std::size_t>(budget)) {
                break;
            }
            selected.push_back(v);
        }
        break;
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

BitVector solve_sub(const SubProblem& sub, const BitVector& start, const IqtsConfig& cfg, std::uint64_t seed,
                    bool& fallback) {
    auto anneal = [&]() {
        SaParams sa = cfg.sa;
        sa.seed = seed;
        return to_bits(sa_solve(to_ising(sub.problem.qubo), sa, to_spins(start)).s);
    };
    fallback = false;
    try {
        switch (cfg.sub_solver) {
            case SubSolver::BruteForce:
                return brute_force(sub.problem.qubo).x;
            case SubSolver::Qaoa: {
                QaoaParams qp = cfg.qaoa;
                qp.seed = seed;
                const QaoaResult r = qaoa_solve(sub.problem, qp);
                return r.best;
            }
            case SubSolver::Sa:
                return anneal();
        }
    } catch (const SolverError&) {
        fallback = true;
    }
    return anneal();
}

}  // namespace

IqtsResult iqts_solve(const QuboModel& model, const IqtsConfig& cfg) {
    if (cfg.m < 1 || cfg.n < 1 || cfg.kappa < 1 || cfg.isf_budget < 0 || cfg.isi_iterations < 0) {
        throw std::invalid_argument("IQTS needs m, n, kappa >= 1");
    }
    const ProblemInstance& inst = model.instance();
    Rng rng(cfg.seed);
    IqtsResult res;
    res.best = isg(model, rng);
    for (int rep = 0; rep < cfg.kappa; ++rep) {
        // deepest parts first, shuffled within each level
        std::vector<std::size_t> order(inst.part_count());
        std::iota(order.begin(), order.end(), 0);
        shuffle(order, rng);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return inst.level(a) > inst.level(b); });
        for (std::size_t part : order) {
            IqtsTraceRow row;
            row.repetition = rep;
            row.part = part;
            row.candidate = std::numeric_limits<double>::quiet_NaN();
            const auto parts = random_subtree(inst, part, cfg.m, rng);
            const auto selected = select_variables(model, parts, res.best.x, cfg.n, rng);
            if (!selected.empty()) {
                BitVector base = res.best.x;
                if (cfg.literal_zero) {
                    std::fill(base.begin(), base.end(), 0);
                    for (std::size_t v : selected) {
                        base[v] = res.best.x[v];
                    }
                }
                const SubProblem sub = build_subproblem(model.qubo(), base, selected, &model.layout());
                bool fallback = false;
                const BitVector local = solve_sub(sub, restrict_to(sub, base), cfg, rng(), fallback);
                row.fallback = fallback;
                res.fallbacks += fallback ? 1 : 0;
                IsfResult fixed = isf(model, merge_subsolution(sub, base, local), cfg.isf_budget, rng);
                if (fixed.ok) {
                    Solution cand = fixed.solution;
                    if (cfg.isi_iterations > 0) {
                        cand = isi(model, cand.x, cfg.isi_iterations, cfg.isi_stop_prob, rng).solution;
                    }
                    row.candidate = cand.eval.objective;
                    if (cand.eval.objective <= res.best.eval.objective + 1e-12) {
                        row.accepted = true;
                        res.best = std::move(cand);
                    }
                }
            }
            row.incumbent = res.best.eval.objective;
            res.trace.push_back(row);
        }
    }
    return res;
}

std::string iqts_trace_csv(const IqtsResult& r) {
    std::string out = "step,repetition,part,candidate,incumbent,accepted,fallback\n";
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const IqtsTraceRow& t = r.trace[i];
        out += std::to_string(i) + ',' + std::to_string(t.repetition) + ',' + std::to_string(t.part) + ',' +
               (std::isnan(t.candidate) ? std::string() : format_double(t.candidate)) + ',' +
               format_double(t.incumbent) + ',' + (t.accepted ? "1" : "0") + ',' + (t.fallback ? "1" : "0") + '\n';
    }
    return out;
}

}  // namespace chainopt
