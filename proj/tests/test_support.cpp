#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "chainopt/instance.hpp"
#include "chainopt/util.hpp"

namespace chainopt::testing {

InstanceData chain_data() {
    InstanceData d;
    d.parts = {{"P0", 10.0, 1.0, std::nullopt, 0.8},
               {"P1", 5.0, 2.0, std::string("P0"), 0.7},
               {"P2", 3.0, 1.0, std::string("P1"), 0.6}};
    d.sites = {{"K0", "R0", 0, 100}, {"K1", "R1", 0, 100}, {"K2", "R0", 0, 100}};
    d.warehouses = {"W0"};
    d.suppliers = {{"U0", 0, 100, 60}, {"U1", 0, 100, 40}};
    d.regions = {"R0", "R1"};
    auto m = [&](std::string id, std::string part, std::string from, std::string to, double c0, double c1, double c2,
                 double cargo) {
        d.transport.push_back(TransportMethod{std::move(id), std::move(part), std::move(from), std::move(to),
                                              {c0, c1, c2}, cargo});
    };
    m("M0", "P1", "K0", "K1", 3.0, 2.0, 1.0, 4.0);
    m("M1", "P1", "K1", "K0", 3.0, 2.5, 1.0, 4.0);
    m("M2", "P1", "K2", "W0", 1.0, 1.0, 0.5, 2.0);
    m("M3", "P1", "W0", "K0", 1.0, 1.5, 0.5, 2.0);
    m("M4", "P1", "W0", "K1", 2.0, 1.0, 0.7, 2.0);
    m("M5", "P1", "K2", "K1", 4.0, 4.0, 2.0, 5.0);
    m("M6", "P2", "K1", "K2", 2.0, 2.0, 1.0, 1.0);
    m("M7", "P2", "K2", "K0", 1.0, 3.0, 1.0, 1.0);
    m("M8", "P2", "K1", "W0", 1.0, 1.0, 1.0, 1.0);
    m("M9", "P2", "W0", "K0", 1.0, 1.0, 1.0, 1.0);
    m("M10", "P2", "K2", "K1", 2.0, 1.5, 1.0, 1.0);
    d.feasible = {{"P0", "K0", "U0", 1.0}, {"P0", "K1", "U1", 1.0}, {"P1", "K0", "U0", 1.0},
                  {"P1", "K1", "U0", 1.0}, {"P1", "K2", "U1", 1.0}, {"P2", "K1", "U1", 1.0},
                  {"P2", "K2", "U0", 1.0}};
    return d;
}

GeneratorParams tiny_params(std::uint64_t seed, int parts) {
    GeneratorParams g;
    g.n_parts = parts;
    g.n_sites = 3;
    g.n_suppliers = 2;
    g.n_warehouses = 1;
    g.n_regions = 2;
    g.edge_density = 0.6;
    g.alpha = 0.8;
    g.seed = seed;
    g.max_depth = 3;
    g.sites_per_part = 2;
    g.suppliers_per_site = 1;
    g.ws_slack = 100;
    return g;
}

std::shared_ptr<const QuboModel> build_model(const ProblemInstance& inst, const Weights& w, const Multipliers& m,
                                             const CompileOptions& o) {
    auto p = std::make_shared<const ProblemInstance>(inst);
    return compile(ReducedInstance::build(p), w, m, o);
}

std::vector<std::shared_ptr<const QuboModel>> oracle_models(std::size_t count, std::size_t lo, std::size_t hi,
                                                            std::uint64_t first_seed) {
    std::vector<std::shared_ptr<const QuboModel>> out;
    Multipliers mult;
    mult.lambda[4] = 0.0;
    mult.lambda[5] = 0.0;
    for (std::uint64_t seed = first_seed; out.size() < count && seed < first_seed + 10000; ++seed) {
        try {
            const ProblemInstance inst = generate_synthetic(tiny_params(seed, 3 + static_cast<int>(seed % 3)));
            auto model = build_model(inst, {}, mult);
            if (model->size() < lo || model->size() > hi) {
                continue;
            }
            if (enumerate_feasible(*model).feasible == 0) {
                continue;
            }
            out.push_back(std::move(model));
        } catch (const std::exception&) {
            continue;
        }
    }
    return out;
}

Qubo random_qubo(std::size_t n, double density, std::uint64_t seed, double scale) {
    Rng rng(seed);
    std::vector<double> lin(n);
    for (double& a : lin) {
        a = scale * (2.0 * uniform01(rng) - 1.0);
    }
    std::vector<Coupling> t;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (uniform01(rng) < density) {
                t.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                             scale * (2.0 * uniform01(rng) - 1.0)});
            }
        }
    }
    return Qubo::from_triplets(n, std::move(t), std::move(lin), scale * (2.0 * uniform01(rng) - 1.0));
}

Qubo random_tree_qubo(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> label(n);
    std::iota(label.begin(), label.end(), 0);
    shuffle(label, rng);
    std::vector<double> lin(n);
    for (double& a : lin) {
        a = 2.0 * uniform01(rng) - 1.0;
    }
    std::vector<Coupling> t;
    for (std::size_t v = 1; v < n; ++v) {
        const std::size_t p = uniform_index(rng, v);
        t.push_back({static_cast<std::uint32_t>(label[v]), static_cast<std::uint32_t>(label[p]),
                     2.0 * uniform01(rng) - 1.0});
    }
    return Qubo::from_triplets(n, std::move(t), std::move(lin), 0.0);
}

double naive_energy(const Qubo& q, const BitVector& x) {
    double e = q.offset();
    for (std::size_t i = 0; i < q.size(); ++i) {
        e += q.linear()[i] * x[i];
    }
    for (const Coupling& c : q.quadratic()) {
        e += c.value * x[c.i] * x[c.j];
    }
    return e;
}

double exhaustive_min(const Qubo& q) {
    const std::size_t n = q.size();
    double best = std::numeric_limits<double>::infinity();
    BitVector x(n);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = (s >> i) & 1;
        }
        best = std::min(best, naive_energy(q, x));
    }
    return best;
}

namespace {

std::array<double, 3> oracle_scales(const ProblemInstance& inst) {
    std::array<double, 3> c{};
    for (const TransportMethod& t : inst.data().transport) {
        for (int n = 0; n < 3; ++n) {
            c[n] = std::max(c[n], t.cost[n]);
        }
    }
    const auto levels = recursive_levels(inst.data());
    int lo = 1 << 30, hi = 0;
    for (const auto& [id, l] : levels) {
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    std::array<double, 3> d{c[0], c[1], c[2] * 0.5 * (lo + hi)};
    for (double& v : d) {
        if (v <= 0.0) {
            v = 1.0;
        }
    }
    return d;
}

}  // namespace

std::optional<PathOracle> best_path(const ProblemInstance& inst, std::size_t part, std::size_t from,
                                    std::size_t to, const std::array<double, 3>& w) {
    const InstanceData& data = inst.data();
    const std::string& pid = data.parts[part].id;
    const auto d = oracle_scales(inst);
    const int level = recursive_levels(data).at(pid);
    struct Edge {
        std::size_t index;
        std::string from, to;
        std::array<double, 3> unit;  // c^n γ
    };
    std::vector<Edge> edges;
    for (std::size_t m = 0; m < data.transport.size(); ++m) {
        const TransportMethod& t = data.transport[m];
        if (t.part != pid || t.from == t.to) {
            continue;
        }
        const double g = data.parts[part].volume / t.cargo_volume;
        edges.push_back({m, t.from, t.to, {t.cost[0] * g, t.cost[1] * g, t.cost[2] * level}});
    }
    const std::string& src = data.sites[from].id;
    const std::string& dst = data.sites[to].id;
    if (from == to) {
        return PathOracle{};
    }
    std::optional<PathOracle> best;
    std::vector<std::size_t> best_seq;
    std::vector<std::size_t> seq;
    std::vector<std::string> visited{src};
    std::function<void(const std::string&, PathOracle)> dfs = [&](const std::string& node, PathOracle acc) {
        if (node == dst) {
            const bool better =
                !best || acc.cost < best->cost - 1e-12 ||
                (std::abs(acc.cost - best->cost) <= 1e-12 &&
                 (seq.size() < best_seq.size() || (seq.size() == best_seq.size() && seq < best_seq)));
            if (better) {
                best = acc;
                best_seq = seq;
            }
            return;
        }
        for (const Edge& e : edges) {
            if (e.from != node || std::find(visited.begin(), visited.end(), e.to) != visited.end()) {
                continue;
            }
            PathOracle next = acc;
            for (int n = 0; n < 3; ++n) {
                next.contribution[n] += e.unit[n];
                next.cost += w[n] / d[n] * e.unit[n];
            }
            visited.push_back(e.to);
            seq.push_back(e.index);
            dfs(e.to, next);
            seq.pop_back();
            visited.pop_back();
        }
    };
    dfs(src, PathOracle{});
    return best;
}

std::map<std::string, int> recursive_levels(const InstanceData& data) {
    std::map<std::string, const Part*> by_id;
    for (const Part& p : data.parts) {
        by_id[p.id] = &p;
    }
    std::function<int(const Part&)> level = [&](const Part& p) -> int {
        return p.parent ? 1 + level(*by_id.at(*p.parent)) : 0;
    };
    std::map<std::string, int> out;
    for (const Part& p : data.parts) {
        out[p.id] = level(p);
    }
    return out;
}

double oracle_objective(const QuboModel& model, const Choice& choice) {
    const ProblemInstance& inst = model.instance();
    const ReducedInstance& red = model.reduced();
    const InstanceData& data = inst.data();
    const auto d = oracle_scales(inst);
    const auto& w = model.weights().w;
    const std::array<double, 3> wt{w[0], w[1], w[2]};
    auto site_of = [&](std::size_t i, int a) { return red.option(i, choice[i][a]).site; };
    auto share = [&](std::size_t i, int a) { return a == 0 ? data.parts[i].alpha : 1.0 - data.parts[i].alpha; };
    std::array<double, 3> transport{};
    for (std::size_t i = 0; i < inst.part_count(); ++i) {
        if (!data.parts[i].parent) {
            continue;
        }
        const std::size_t j = inst.part_index(*data.parts[i].parent);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const auto path = best_path(inst, i, site_of(i, a), site_of(j, b), wt);
                if (!path) {
                    return std::numeric_limits<double>::infinity();
                }
                for (int n = 0; n < 3; ++n) {
                    transport[n] += share(i, a) * path->contribution[n];
                }
            }
        }
    }
    double total_value = 0.0;
    for (const Part& p : data.parts) {
        total_value += p.value;
    }
    std::vector<double> load(data.suppliers.size(), 0.0);
    for (std::size_t i = 0; i < inst.part_count(); ++i) {
        for (int a = 0; a < 2; ++a) {
            load[red.option(i, choice[i][a]).supplier] += 100.0 * data.parts[i].value / total_value * share(i, a);
        }
    }
    double c4 = 0.0;
    for (std::size_t u = 0; u < load.size(); ++u) {
        c4 += (load[u] - data.suppliers[u].ws_target) * (load[u] - data.suppliers[u].ws_target);
    }
    double obj = w[3] * c4 / 100.0;
    for (int n = 0; n < 3; ++n) {
        obj += w[n] * transport[n] / d[n];
    }
    return obj;
}

ChoiceOptimum enumerate_feasible(const QuboModel& model) {
    const ReducedInstance& red = model.reduced();
    const std::size_t parts = red.part_count();
    ChoiceOptimum best;
    best.objective = std::numeric_limits<double>::infinity();
    Choice choice(parts, {0, 0});
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == parts) {
            if (!check_assignment(red, model.rational(), choice).feasible) {
                return;
            }
            ++best.feasible;
            const double obj = oracle_objective(model, choice);
            if (obj < best.objective) {
                best.objective = obj;
                best.choice = choice;
            }
            return;
        }
        const std::size_t k = red.option_count(i);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
                if (red.aliased(i) && a != b) {
                    continue;
                }
                choice[i] = {a, b};
                rec(i + 1);
            }
        }
    };
    rec(0);
    return best;
}

double mc_hypervolume(const std::vector<Kpi4>& points, const Kpi4& ref, std::size_t samples, std::uint64_t seed) {
    if (points.empty()) {
        return 0.0;
    }
    Kpi4 lo = ref;
    for (const Kpi4& p : points) {
        for (int d = 0; d < 4; ++d) {
            lo[d] = std::min(lo[d], p[d]);
        }
    }
    double box = 1.0;
    for (int d = 0; d < 4; ++d) {
        box *= ref[d] - lo[d];
    }
    Rng rng(seed);
    std::size_t hit = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        Kpi4 z;
        for (int d = 0; d < 4; ++d) {
            z[d] = lo[d] + (ref[d] - lo[d]) * uniform01(rng);
        }
        for (const Kpi4& p : points) {
            if (p[0] <= z[0] && p[1] <= z[1] && p[2] <= z[2] && p[3] <= z[3]) {
                ++hit;
                break;
            }
        }
    }
    return box * static_cast<double>(hit) / static_cast<double>(samples);
}

std::vector<std::size_t> pairwise_pareto(const std::vector<Kpi4>& pts) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < pts.size() && keep; ++j) {
            if (j == i) continue;
            bool le = true;
            for (int d = 0; d < 4; ++d) le = le && pts[j][d] <= pts[i][d];
            if (le && (pts[j] != pts[i] || j < i)) keep = false;
        }
        if (keep) out.push_back(i);
    }
    return out;
}

}  // namespace chainopt::testing
