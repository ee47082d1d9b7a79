#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "chainopt/metasolvers.hpp"
#include "chainopt/subproblem.hpp"

namespace chainopt {

const char* hbs_solver_name(HbsSolver s) {
    switch (s) {
        case HbsSolver::Cacm: return "cacm";
        case HbsSolver::Ibp: return "ibp";
        case HbsSolver::Qaoa: return "qaoa";
    }
    return "?";
}

HbsSolver parse_hbs_solver(const std::string& name) {
    if (name == "cacm") return HbsSolver::Cacm;
    if (name == "ibp") return HbsSolver::Ibp;
    if (name == "qaoa") return HbsSolver::Qaoa;
    throw std::invalid_argument("unknown HBS solver '" + name + "' (expected cacm, ibp or qaoa)");
}

std::vector<DasParam> hbs_search_space(HbsSolver s) {
    switch (s) {
        case HbsSolver::Cacm:
            return {
                {"lambda1", 0.2, 2.0, 1.0, 0.2, false, false},
                {"lambda2", -1.0, 0.5, -0.1, 0.2, false, false},
                {"gamma", 0.0, 0.5, 0.1, 0.05, false, false},
                {"beta", 0.05, 5.0, 1.0, 0.3, true, false},
                {"xi", 0.01, 1.0, 0.1, 0.3, true, false},
                {"a", 0.2, 1.0, 0.6, 0.1, false, false},
                {"T", 50.0, 2000.0, 300.0, 0.3, true, true},
            };
        case HbsSolver::Ibp:
            // inverse temperature relative to the largest coefficient
            return {{"beta", 1.0, 500.0, 30.0, 0.5, true, false}};
        case HbsSolver::Qaoa:
            return {};
    }
    return {};
}

namespace {

CacmParams cacm_from(const std::vector<double>& p, std::uint64_t seed) {
    CacmParams c;
    c.lambda1 = p[0];
    c.lambda2 = p[1];
    c.gamma = p[2];
    c.beta = p[3];
    c.xi = p[4];
    c.a = p[5];
    c.T = static_cast<int>(p[6]);
    c.seed = seed;
    return c;
}

/// Random one-hot groups up to the qubit budget, solved by QAOA with everything else clamped to x.
BitVector qaoa_refine(const QuboModel& model, const BitVector& x, const HbsConfig& cfg, Rng& rng) {
    const VariableLayout& lay = model.layout();
    std::vector<std::size_t> groups(lay.groups().size());
    std::iota(groups.begin(), groups.end(), 0);
    shuffle(groups, rng);
    std::vector<std::size_t> selected;
    for (std::size_t g : groups) {
        const auto& members = lay.groups()[g];
        if (selected.size() + members.size() <= cfg.qaoa_qubits) {
            selected.insert(selected.end(), members.begin(), members.end());
        }
    }
    if (selected.empty()) {
        return x;
    }
    std::sort(selected.begin(), selected.end());
    const SubProblem sub = build_subproblem(model.qubo(), x, selected, &lay);
    QaoaParams qp = cfg.qaoa;
    qp.seed = rng();
    return merge_subsolution(sub, x, qaoa_solve(sub.problem, qp).best);
}

struct Task {
    std::size_t solver;
    std::size_t draw;
    BitVector out;
    double energy = 0.0;
    bool failed = false;
};

}  // namespace

HbsResult hbs_solve(const QuboModel& model, const HbsConfig& cfg) {
    if (cfg.solvers.empty() || cfg.population < 1 || cfg.max_iterations < 0 || cfg.convergence_window < 1) {
        throw std::invalid_argument("HBS needs at least one solver and a positive population");
    }
    const Qubo& q = model.qubo();
    const Ising ising = to_ising(q);
    double qscale = q.max_abs_coefficient();
    if (qscale <= 0.0) {
        qscale = 1.0;
    }
    Rng rng(cfg.seed);
    HbsResult res;

    std::vector<BitVector> population;
    for (int p = 0; p < cfg.population; ++p) {
        Solution s = isg(model, rng);
        if (p == 0 || s.eval.objective < res.best.eval.objective) {
            res.best = s;
        }
        population.push_back(std::move(s.x));
    }
    double target = res.best.eval.objective;

    std::vector<DasState> das;
    for (std::size_t k = 0; k < cfg.solvers.size(); ++k) {
        DasConfig dc = cfg.das;
        dc.seed = derive_seed(cfg.seed, 1000 + k);
        das.emplace_back(hbs_search_space(cfg.solvers[k]), dc);
    }

    int stale = 0;
    for (int it = 0; it < cfg.max_iterations && stale < cfg.convergence_window; ++it) {
        std::vector<std::vector<DasDraw>> draws;
        std::vector<Task> tasks;
        for (std::size_t k = 0; k < cfg.solvers.size(); ++k) {
            draws.push_back(das_sample(das[k]));
            for (std::size_t r = 0; r < draws.back().size(); ++r) {
                tasks.push_back(Task{k, r, {}, 0.0, false});
            }
        }
        const std::uint64_t iter_seed = derive_seed(cfg.seed, 1u << 20 | static_cast<std::uint64_t>(it));
        parallel_for(
            tasks.size(),
            [&](std::size_t t) {
                Task& task = tasks[t];
                const std::vector<double>& theta = draws[task.solver][task.draw].params;
                const BitVector& start = population[(task.draw + task.solver) % population.size()];
                const std::uint64_t seed = derive_seed(iter_seed, t);
                try {
                    switch (cfg.solvers[task.solver]) {
                        case HbsSolver::Cacm:
                            task.out = to_bits(cacm_solve(ising, cacm_from(theta, seed), to_spins(start)).s);
                            break;
                        case HbsSolver::Ibp: {
                            IbpParams ip;
                            ip.beta = theta[0] / qscale;
                            ip.sweeps = cfg.ibp_sweeps;
                            ip.seed = seed;
                            task.out = ibp_solve(q, ip, start).x;
                            break;
                        }
                        case HbsSolver::Qaoa: {
                            Rng local(seed);
                            task.out = qaoa_refine(model, start, cfg, local);
                            break;
                        }
                    }
                    task.energy = q.energy(task.out);
                } catch (const SolverError&) {
                    task.failed = true;
                }
            },
            cfg.threads);

        HbsTraceRow row;
        row.iteration = it;
        row.best_candidate = std::numeric_limits<double>::infinity();
        // DAS step per solver on a logistic-smoothed success indicator relative to H*
        for (std::size_t k = 0; k < cfg.solvers.size(); ++k) {
            std::vector<DasDraw> ok_draws;
            std::vector<double> energies;
            for (const Task& t : tasks) {
                if (t.solver == k && !t.failed) {
                    ok_draws.push_back(draws[k][t.draw]);
                    energies.push_back(t.energy);
                }
            }
            if (energies.size() >= 2) {
                double mean = 0.0, var = 0.0;
                for (double e : energies) mean += e;
                mean /= static_cast<double>(energies.size());
                for (double e : energies) var += (e - mean) * (e - mean);
                const double tau = std::sqrt(var / static_cast<double>(energies.size()));
                std::vector<double> costs;
                for (double e : energies) {
                    costs.push_back(tau > 0.0 ? 1.0 / (1.0 + std::exp(-(e - target) / tau)) : (e > target ? 1.0 : 0.0));
                }
                das_update(das[k], ok_draws, costs);
            }
            row.params.push_back(das[k].params());
        }

        // merge: lowest energies among the previous population and all outputs, ties broken uniformly
        std::vector<std::pair<double, BitVector>> cands;
        for (const BitVector& x : population) {
            cands.emplace_back(q.energy(x), x);
        }
        for (Task& t : tasks) {
            if (!t.failed) {
                row.best_candidate = std::min(row.best_candidate, t.energy);
                cands.emplace_back(t.energy, std::move(t.out));
            }
        }
        if (std::isfinite(row.best_candidate)) {
            target = std::min(target, row.best_candidate);
        } else {
            row.skipped = true;
        }
        shuffle(cands, rng);
        std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        cands.resize(std::min(cands.size(), static_cast<std::size_t>(cfg.population)));

        bool improved = false;
        population.clear();
        for (auto& c : cands) {
            IsfResult fixed = isf(model, c.second, cfg.isf_budget, rng);
            if (!fixed.ok) {
                continue;
            }
            if (fixed.solution.eval.objective < res.best.eval.objective - 1e-12) {
                res.best = fixed.solution;
                improved = true;
            }
            population.push_back(std::move(fixed.solution.x));
        }
        while (population.size() < static_cast<std::size_t>(cfg.population)) {
            population.push_back(res.best.x);
        }
        stale = improved ? 0 : stale + 1;
        row.incumbent = res.best.eval.objective;
        row.target = target;
        res.trace.push_back(std::move(row));
        res.iterations = it + 1;
    }
    return res;
}

std::string hbs_trace_csv(const HbsResult& r, const HbsConfig& cfg) {
    std::string out = "iteration,best_candidate,incumbent,target,skipped";
    for (HbsSolver s : cfg.solvers) {
        for (const DasParam& p : hbs_search_space(s)) {
            out += std::string(",") + hbs_solver_name(s) + "_" + p.name;
        }
    }
    out += '\n';
    for (const HbsTraceRow& t : r.trace) {
        out += std::to_string(t.iteration) + ',' +
               (std::isfinite(t.best_candidate) ? format_double(t.best_candidate) : std::string()) + ',' +
               format_double(t.incumbent) + ',' + format_double(t.target) + ',' + (t.skipped ? "1" : "0");
        for (const auto& ps : t.params) {
            for (double v : ps) {
                out += ',' + format_double(v);
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace chainopt
