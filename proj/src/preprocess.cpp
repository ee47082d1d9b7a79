#include "chainopt/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "chainopt/util.hpp"

namespace chainopt {

KpiScales kpi_scales(const ProblemInstance& instance) {
    KpiScales s;
    for (std::size_t m = 0; m < instance.method_count(); ++m) {
        for (int n = 0; n < 3; ++n) {
            s.c_hat[n] = std::max(s.c_hat[n], instance.method(m).cost[n]);
        }
    }
    s.level_mid = 0.5 * (instance.min_level() + instance.max_level());
    const double raw[3] = {s.c_hat[0], s.c_hat[1], s.c_hat[2] * s.level_mid};
    for (int n = 0; n < 3; ++n) {
        s.d[n] = raw[n] > 0.0 ? raw[n] : 1.0;
    }
    s.d[3] = 100.0;
    return s;
}

double gamma_factor(const ProblemInstance& instance, std::size_t part, std::size_t method, int n) {
    if (n == 2) {
        return static_cast<double>(instance.level(part));
    }
    return instance.part(part).volume / instance.method(method).cargo_volume;
}

double edge_cost(const ProblemInstance& instance, std::size_t part, std::size_t method,
                 const std::array<double, 3>& w, const KpiScales& scales) {
    double xi = 0.0;
    for (int n = 0; n < 3; ++n) {
        if (w[n] != 0.0) {
            xi += (w[n] / scales.d[n]) * instance.method(method).cost[n] * gamma_factor(instance, part, method, n);
        }
    }
    return xi;
}

RouteTable::RouteTable(std::array<double, 3> w, std::size_t parts, std::size_t sites)
    : w_(w), sites_(sites), routes_(parts, std::vector<std::optional<Route>>(sites * sites)) {}

const Route* RouteTable::find(std::size_t part, std::size_t from_site, std::size_t to_site) const {
    const auto& r = routes_[part][from_site * sites_ + to_site];
    return r ? &*r : nullptr;
}

void RouteTable::set(std::size_t part, std::size_t from_site, std::size_t to_site, Route r) {
    routes_[part][from_site * sites_ + to_site] = std::move(r);
}

std::string RouteTable::to_csv(const ProblemInstance& instance) const {
    std::ostringstream out;
    out << "part,origin,dest,c1,c2,c3,route\n";
    for (std::size_t i = 0; i < routes_.size(); ++i) {
        for (std::size_t k = 0; k < sites_; ++k) {
            for (std::size_t l = 0; l < sites_; ++l) {
                const Route* r = find(i, k, l);
                if (!r) {
                    continue;
                }
                std::string ids;
                for (std::size_t m : r->methods) {
                    if (!ids.empty()) {
                        ids += ';';
                    }
                    ids += instance.data().transport[m].id;
                }
                out << csv_escape(instance.part(i).id) << ',' << csv_escape(instance.site(k).id) << ','
                    << csv_escape(instance.site(l).id) << ',' << format_double(r->contribution[0]) << ','
                    << format_double(r->contribution[1]) << ',' << format_double(r->contribution[2]) << ','
                    << csv_escape(ids) << '\n';
            }
        }
    }
    return out.str();
}

namespace {

struct Label {
    double cost = 0.0;
    std::vector<std::size_t> methods;

    bool operator<(const Label& o) const {
        if (cost != o.cost) {
            return cost < o.cost;
        }
        if (methods.size() != o.methods.size()) {
            return methods.size() < o.methods.size();
        }
        return methods < o.methods;
    }
};

}  // namespace

std::vector<std::optional<Route>> optimal_routes(const ProblemInstance& instance, std::size_t part,
                                                 const std::array<double, 3>& w, const KpiScales& scales) {
    const std::size_t nodes = instance.node_count();
    const std::size_t sites = instance.site_count();
    std::vector<std::vector<std::size_t>> out_edges(nodes);
    std::vector<double> xi(instance.method_count(), 0.0);
    for (std::size_t m : instance.methods_of_part(part)) {
        const MethodRef& mr = instance.method(m);
        if (mr.from != mr.to) {
            out_edges[mr.from].push_back(m);
        }
        xi[m] = edge_cost(instance, part, m, w, scales);
    }

    std::vector<std::optional<Route>> result(sites * sites);
    for (std::size_t src = 0; src < sites; ++src) {
        std::vector<std::optional<Label>> label(nodes);
        std::vector<bool> done(nodes, false);
        label[src] = Label{};
        for (;;) {
            std::size_t best = nodes;
            for (std::size_t n = 0; n < nodes; ++n) {
                if (!done[n] && label[n] && (best == nodes || *label[n] < *label[best])) {
                    best = n;
                }
            }
            if (best == nodes) {
                break;
            }
            done[best] = true;
            for (std::size_t m : out_edges[best]) {
                const std::size_t to = instance.method(m).to;
                if (done[to]) {
                    continue;
                }
                Label cand{label[best]->cost + xi[m], label[best]->methods};
                cand.methods.push_back(m);
                if (!label[to] || cand < *label[to]) {
                    label[to] = std::move(cand);
                }
            }
        }
        for (std::size_t dst = 0; dst < sites; ++dst) {
            if (!label[dst]) {
                continue;
            }
            Route r;
            r.methods = label[dst]->methods;
            r.cost = label[dst]->cost;
            for (std::size_t m : r.methods) {
                for (int n = 0; n < 3; ++n) {
                    r.contribution[n] += instance.method(m).cost[n] * gamma_factor(instance, part, m, n);
                }
            }
            result[src * sites + dst] = std::move(r);
        }
    }
    return result;
}

RouteTable build_route_table(const ProblemInstance& instance, const std::array<double, 3>& w,
                             const KpiScales& scales) {
    RouteTable table(w, instance.part_count(), instance.site_count());
    const std::size_t sites = instance.site_count();
    for (std::size_t i = 0; i < instance.part_count(); ++i) {
        auto routes = optimal_routes(instance, i, w, scales);
        for (std::size_t k = 0; k < sites; ++k) {
            for (std::size_t l = 0; l < sites; ++l) {
                if (routes[k * sites + l]) {
                    table.set(i, k, l, std::move(*routes[k * sites + l]));
                }
            }
        }
    }
    return table;
}

std::vector<std::vector<bool>> site_reachability(const ProblemInstance& instance, std::size_t part) {
    const std::size_t nodes = instance.node_count();
    const std::size_t sites = instance.site_count();
    std::vector<std::vector<std::size_t>> adj(nodes);
    for (std::size_t m : instance.methods_of_part(part)) {
        adj[instance.method(m).from].push_back(instance.method(m).to);
    }
    std::vector<std::vector<bool>> reach(sites, std::vector<bool>(sites, false));
    for (std::size_t k = 0; k < sites; ++k) {
        std::vector<bool> seen(nodes, false);
        std::vector<std::size_t> stack{k};
        seen[k] = true;
        while (!stack.empty()) {
            std::size_t n = stack.back();
            stack.pop_back();
            for (std::size_t t : adj[n]) {
                if (!seen[t]) {
                    seen[t] = true;
                    stack.push_back(t);
                }
            }
        }
        for (std::size_t l = 0; l < sites; ++l) {
            reach[k][l] = seen[l];
        }
    }
    return reach;
}

std::vector<std::vector<std::size_t>> feasibility_reduction(
    const ProblemInstance& instance, const std::vector<std::vector<std::vector<bool>>>& reach,
    const std::vector<std::size_t>* site_rank) {
    const std::size_t n = instance.part_count();
    std::vector<std::vector<std::size_t>> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i].resize(instance.options(i).size());
        std::iota(g[i].begin(), g[i].end(), 0);
        if (site_rank) {
            std::stable_sort(g[i].begin(), g[i].end(), [&](std::size_t a, std::size_t b) {
                return (*site_rank)[instance.options(i)[a].site] < (*site_rank)[instance.options(i)[b].site];
            });
        }
    }

    auto supported = [&](std::size_t i, std::size_t opt) {
        const std::size_t k = instance.options(i)[opt].site;
        for (std::size_t c : instance.children(i)) {
            bool any = std::any_of(g[c].begin(), g[c].end(),
                                   [&](std::size_t o) { return reach[c][instance.options(c)[o].site][k]; });
            if (!any) {
                return false;
            }
        }
        if (i != instance.root()) {
            const std::size_t p = instance.parent(i);
            return std::any_of(g[p].begin(), g[p].end(),
                               [&](std::size_t o) { return reach[i][k][instance.options(p)[o].site]; });
        }
        return true;
    };

    std::vector<std::size_t> by_level(n);
    std::iota(by_level.begin(), by_level.end(), 0);
    std::stable_sort(by_level.begin(), by_level.end(),
                     [&](std::size_t a, std::size_t b) { return instance.level(a) > instance.level(b); });

    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t idx = 0; idx < n; ++idx) {
                const std::size_t i = pass == 0 ? by_level[idx] : by_level[n - 1 - idx];
                auto keep_end = std::stable_partition(g[i].begin(), g[i].end(),
                                                      [&](std::size_t o) { return supported(i, o); });
                if (keep_end != g[i].end()) {
                    g[i].erase(keep_end, g[i].end());
                    changed = true;
                }
                if (g[i].empty()) {
                    const std::string& id = instance.part(i).id;
                    throw InfeasibleInstanceError(
                        id, "part '" + id + "' has no site-supplier combination compatible with its neighbors");
                }
            }
        }
    }
    for (auto& set : g) {
        std::sort(set.begin(), set.end());
    }
    return g;
}

std::shared_ptr<const ReducedInstance> ReducedInstance::build(std::shared_ptr<const ProblemInstance> instance) {
    std::shared_ptr<ReducedInstance> r(new ReducedInstance());
    r->instance_ = std::move(instance);
    const ProblemInstance& inst = *r->instance_;
    const std::size_t n = inst.part_count();
    r->reach_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r->reach_[i] = site_reachability(inst, i);
    }
    r->g_ = feasibility_reduction(inst, r->reach_);
    r->sites_.resize(n);
    r->regions_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t o : r->g_[i]) {
            const std::size_t k = inst.options(i)[o].site;
            if (std::find(r->sites_[i].begin(), r->sites_[i].end(), k) == r->sites_[i].end()) {
                r->sites_[i].push_back(k);
            }
            const std::size_t reg = inst.site_region(k);
            if (std::find(r->regions_[i].begin(), r->regions_[i].end(), reg) == r->regions_[i].end()) {
                r->regions_[i].push_back(reg);
            }
        }
        std::sort(r->sites_[i].begin(), r->sites_[i].end());
        std::sort(r->regions_[i].begin(), r->regions_[i].end());
    }
    r->scales_ = kpi_scales(inst);
    return r;
}

std::size_t ReducedInstance::total_option_count() const {
    std::size_t total = 0;
    for (const auto& set : g_) {
        total += set.size();
    }
    return total;
}

std::shared_ptr<const RouteTable> ReducedInstance::routes(const std::array<double, 3>& w) const {
    std::array<long long, 3> key{};
    for (int n = 0; n < 3; ++n) {
        key[n] = std::llround(w[n] * 1e12);
    }
    std::lock_guard lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
        return it->second;
    }
    auto table = std::make_shared<const RouteTable>(build_route_table(*instance_, w, scales_));
    cache_.emplace(key, table);
    return table;
}

}  // namespace chainopt
