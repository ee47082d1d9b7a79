#include "chainopt/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "chainopt/rational.hpp"
#include "chainopt/util.hpp"

namespace chainopt {

namespace {

double round2(double v) {
    return std::round(v * 100.0) / 100.0;
}

double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

struct Planted {
    std::size_t site[2];
    std::size_t supplier[2];
};

class Builder {
public:
    explicit Builder(const GeneratorParams& p) : p_(p), rng_(p.seed) {}

    ProblemInstance build();

private:
    void add_method(std::size_t part, std::size_t from_node, std::size_t to_node);
    std::string node_name(std::size_t node) const {
        return node < static_cast<std::size_t>(p_.n_sites) ? "K" + std::to_string(node)
                                                            : "W" + std::to_string(node - p_.n_sites);
    }
    bool has_path(std::size_t part, std::size_t from, std::size_t to) const;

    const GeneratorParams& p_;
    Rng rng_;
    InstanceData d_;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edges_;  // per part
};

bool Builder::has_path(std::size_t part, std::size_t from, std::size_t to) const {
    if (from == to) {
        return true;
    }
    std::set<std::size_t> seen{from};
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
        std::size_t n = stack.back();
        stack.pop_back();
        for (auto [a, b] : edges_[part]) {
            if (a == n && seen.insert(b).second) {
                if (b == to) {
                    return true;
                }
                stack.push_back(b);
            }
        }
    }
    return false;
}

void Builder::add_method(std::size_t part, std::size_t from_node, std::size_t to_node) {
    TransportMethod m;
    m.id = "M" + std::to_string(d_.transport.size());
    m.part = d_.parts[part].id;
    m.from = node_name(from_node);
    m.to = node_name(to_node);
    m.cost = {round2(uniform(rng_, 0.5, 10.0)), round2(uniform(rng_, 0.5, 10.0)), round2(uniform(rng_, 0.5, 5.0))};
    m.cargo_volume = round2(d_.parts[part].volume * uniform(rng_, 1.0, 4.0));
    if (m.cargo_volume < d_.parts[part].volume) {
        m.cargo_volume = d_.parts[part].volume;
    }
    edges_[part].emplace_back(from_node, to_node);
    d_.transport.push_back(std::move(m));
}

ProblemInstance Builder::build() {
    const std::size_t n_parts = p_.n_parts;
    const std::size_t n_sites = p_.n_sites;
    const std::size_t n_sup = p_.n_suppliers;
    const std::size_t n_wh = p_.n_warehouses;

    for (int r = 0; r < p_.n_regions; ++r) {
        d_.regions.push_back("R" + std::to_string(r));
    }
    for (std::size_t k = 0; k < n_sites; ++k) {
        d_.sites.push_back(Site{"K" + std::to_string(k), d_.regions[k % d_.regions.size()], 0, 100});
    }
    for (std::size_t w = 0; w < n_wh; ++w) {
        d_.warehouses.push_back("W" + std::to_string(w));
    }
    for (std::size_t u = 0; u < n_sup; ++u) {
        d_.suppliers.push_back(Supplier{"U" + std::to_string(u), 0, 100, 0});
    }

    // product structure: random tree of bounded depth
    std::vector<int> depth(n_parts, 0);
    std::vector<std::size_t> parent(n_parts, 0);
    for (std::size_t i = 0; i < n_parts; ++i) {
        Part part;
        part.id = "P" + std::to_string(i);
        part.value = round2(uniform(rng_, 1.0, 20.0));
        part.volume = round2(uniform(rng_, 0.5, 3.0));
        part.alpha = p_.alpha;
        if (i > 0) {
            std::vector<std::size_t> eligible;
            for (std::size_t j = 0; j < i; ++j) {
                if (depth[j] < p_.max_depth) {
                    eligible.push_back(j);
                }
            }
            parent[i] = eligible[uniform_index(rng_, eligible.size())];
            depth[i] = depth[parent[i]] + 1;
            part.parent = d_.parts[parent[i]].id;
        }
        d_.parts.push_back(std::move(part));
    }

    // candidate sites, offered suppliers and the planted choice
    std::vector<std::vector<std::size_t>> cand(n_parts);
    std::vector<std::vector<std::vector<std::size_t>>> offered(n_parts);
    std::vector<Planted> planted(n_parts);
    const std::size_t per_part = std::min<std::size_t>(std::max(1, p_.sites_per_part), n_sites);
    const std::size_t per_site = std::min<std::size_t>(std::max(1, p_.suppliers_per_site), n_sup);
    for (std::size_t i = 0; i < n_parts; ++i) {
        std::vector<std::size_t> all(n_sites);
        for (std::size_t k = 0; k < n_sites; ++k) {
            all[k] = k;
        }
        shuffle(all, rng_);
        std::size_t count = per_part;
        if (i > 0 && uniform01(rng_) < p_.single_site_fraction) {
            count = 1;
        }
        cand[i].assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
        std::sort(cand[i].begin(), cand[i].end());
        for (std::size_t k : cand[i]) {
            std::vector<std::size_t> sup(n_sup);
            for (std::size_t u = 0; u < n_sup; ++u) {
                sup[u] = u;
            }
            shuffle(sup, rng_);
            sup.resize(per_site);
            std::sort(sup.begin(), sup.end());
            offered[i].push_back(sup);
            for (std::size_t u : sup) {
                d_.feasible.push_back(FeasibleOption{d_.parts[i].id, d_.sites[k].id, d_.suppliers[u].id,
                                                     round2(uniform(rng_, 1.0, 30.0))});
            }
        }
        std::size_t c1 = uniform_index(rng_, cand[i].size());
        std::size_t c2 = c1;
        if (cand[i].size() >= 2) {
            std::set<std::string> regions;
            for (std::size_t k : cand[i]) {
                regions.insert(d_.sites[k].region);
            }
            std::vector<std::size_t> second;
            for (std::size_t c = 0; c < cand[i].size(); ++c) {
                if (c == c1) {
                    continue;
                }
                if (regions.size() >= 2 && d_.sites[cand[i][c]].region == d_.sites[cand[i][c1]].region) {
                    continue;
                }
                second.push_back(c);
            }
            c2 = second[uniform_index(rng_, second.size())];
        }
        planted[i].site[0] = cand[i][c1];
        planted[i].site[1] = cand[i][c2];
        planted[i].supplier[0] = offered[i][c1][uniform_index(rng_, offered[i][c1].size())];
        planted[i].supplier[1] =
            c2 == c1 ? planted[i].supplier[0] : offered[i][c2][uniform_index(rng_, offered[i][c2].size())];
    }

    // transport: planted routes first, then random extra connections
    edges_.assign(n_parts, {});
    for (std::size_t i = 1; i < n_parts; ++i) {
        const std::size_t j = parent[i];
        for (std::size_t a : planted[i].site) {
            for (std::size_t b : planted[j].site) {
                if (has_path(i, a, b)) {
                    continue;
                }
                if (n_wh > 0 && uniform01(rng_) < 0.5) {
                    std::size_t w = n_sites + uniform_index(rng_, n_wh);
                    add_method(i, a, w);
                    add_method(i, w, b);
                } else {
                    add_method(i, a, b);
                }
            }
        }
        for (std::size_t a : cand[i]) {
            for (std::size_t b : cand[j]) {
                if (a == b) {
                    continue;
                }
                double r = uniform01(rng_);
                if (r < p_.edge_density) {
                    add_method(i, a, b);
                } else if (n_wh > 0 && r < p_.edge_density * 1.5) {
                    std::size_t w = n_sites + uniform_index(rng_, n_wh);
                    add_method(i, a, w);
                    add_method(i, w, b);
                }
            }
        }
    }

    // workshare windows around the planted solution
    InstanceData probe = d_;
    ProblemInstance staged(probe);
    RationalApprox ra = rational_approx(staged, p_.value_denominator, p_.share_denominator);
    std::vector<std::int64_t> site_load(n_sites, 0), sup_load(n_sup, 0);
    for (std::size_t i = 0; i < n_parts; ++i) {
        const bool single = planted[i].site[0] == planted[i].site[1] && planted[i].supplier[0] == planted[i].supplier[1];
        for (int a = 0; a < 2; ++a) {
            std::int64_t w = single && a == 1 ? ra.workshare(i, 1) : ra.workshare(i, a);
            site_load[planted[i].site[a]] += w;
            sup_load[planted[i].supplier[a]] += w;
        }
    }
    const double scale = static_cast<double>(p_.value_denominator) * p_.share_denominator;
    auto window = [&](std::int64_t load, int& lo, int& hi) {
        double pct = static_cast<double>(load) / scale;
        lo = std::max(0, static_cast<int>(std::floor(pct)) - p_.ws_slack);
        hi = std::min(100, static_cast<int>(std::ceil(pct)) + p_.ws_slack);
        if (ra.scaled_bound(lo) > load || ra.scaled_bound(hi) < load) {
            throw GenerationError("workshare windows cannot admit the planted assignment");
        }
    };
    for (std::size_t k = 0; k < n_sites; ++k) {
        window(site_load[k], d_.sites[k].ws_min, d_.sites[k].ws_max);
    }
    for (std::size_t u = 0; u < n_sup; ++u) {
        Supplier& s = d_.suppliers[u];
        window(sup_load[u], s.ws_min, s.ws_max);
        s.ws_target = s.ws_min + static_cast<int>(uniform_index(rng_, static_cast<std::size_t>(s.ws_max - s.ws_min + 1)));
    }
    return ProblemInstance(std::move(d_));
}

}  // namespace

ProblemInstance generate_synthetic(const GeneratorParams& params) {
    if (params.n_parts < 1 || params.n_sites < 1 || params.n_suppliers < 1 || params.n_regions < 1 ||
        params.n_warehouses < 0) {
        throw GenerationError("all counts must be at least 1 (warehouses at least 0)");
    }
    if (!(params.edge_density > 0.0 && params.edge_density <= 1.0)) {
        throw GenerationError("edge density must lie in (0, 1]");
    }
    if (!(params.alpha >= 0.5 && params.alpha <= 1.0)) {
        throw GenerationError("alpha must lie in [0.5, 1]");
    }
    if (params.max_depth < 1 || params.ws_slack < 0 || params.value_denominator < 1 || params.share_denominator < 1) {
        throw GenerationError("invalid generator settings");
    }
    if (params.n_regions > params.n_sites) {
        throw GenerationError("more regions than sites");
    }
    return Builder(params).build();
}

}  // namespace chainopt
