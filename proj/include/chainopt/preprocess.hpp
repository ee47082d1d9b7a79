#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainopt/instance.hpp"

namespace chainopt {

/// Raised when the feasibility reduction empties some g_i.
class InfeasibleInstanceError : public InstanceError {
public:
    InfeasibleInstanceError(const std::string& part, const std::string& what)
        : InstanceError(what), part_(part) {}
    const std::string& part() const { return part_; }

private:
    std::string part_;
};

/// Normalization constants d_1..d_4 and the quantities they are built from.
struct KpiScales {
    std::array<double, 4> d{1.0, 1.0, 1.0, 100.0};
    std::array<double, 3> c_hat{};  // largest raw contribution per KPI over all methods
    double level_mid = 0.0;         // (min level + max level) / 2
};

KpiScales kpi_scales(const ProblemInstance& instance);

/// γ^{in}(m): Vol_i/Vol_m for emissions and cost, L_i for time. `n` is 0-based.
double gamma_factor(const ProblemInstance& instance, std::size_t part, std::size_t method, int n);

/// Scalarized edge weight ξ^i(w̄, m) for the three transport KPIs.
double edge_cost(const ProblemInstance& instance, std::size_t part, std::size_t method,
                 const std::array<double, 3>& w, const KpiScales& scales);

struct Route {
    std::vector<std::size_t> methods;  // global method indices in travel order
    std::array<double, 3> contribution{};  // c^{in}_{k⇒l}, unweighted
    double cost = 0.0;                 // Σ ξ along the route
};

/// Best routes between sites for every part under one weight vector w̄.
class RouteTable {
public:
    RouteTable(std::array<double, 3> w, std::size_t parts, std::size_t sites);

    const std::array<double, 3>& weights() const { return w_; }
    const Route* find(std::size_t part, std::size_t from_site, std::size_t to_site) const;
    void set(std::size_t part, std::size_t from_site, std::size_t to_site, Route r);

    std::string to_csv(const ProblemInstance& instance) const;

private:
    std::array<double, 3> w_;
    std::size_t sites_;
    std::vector<std::vector<std::optional<Route>>> routes_;  // [part][from * sites + to]
};

/// Optimal site-to-site routes of one part by Dijkstra (ties: fewer hops, then smaller method indices).
std::vector<std::optional<Route>> optimal_routes(const ProblemInstance& instance, std::size_t part,
                                                 const std::array<double, 3>& w, const KpiScales& scales);

RouteTable build_route_table(const ProblemInstance& instance, const std::array<double, 3>& w,
                             const KpiScales& scales);

/// Weight-independent site-to-site reachability per part; a site always reaches itself.
std::vector<std::vector<bool>> site_reachability(const ProblemInstance& instance, std::size_t part);

/// Greatest fixed point of the reduced feasible sets g_i (indices into instance.options(i)).
/// `site_rank` optionally permutes the order in which options are examined.
std::vector<std::vector<std::size_t>> feasibility_reduction(
    const ProblemInstance& instance, const std::vector<std::vector<std::vector<bool>>>& reach,
    const std::vector<std::size_t>* site_rank = nullptr);

class ReducedInstance {
public:
    static std::shared_ptr<const ReducedInstance> build(std::shared_ptr<const ProblemInstance> instance);

    const ProblemInstance& instance() const { return *instance_; }
    std::shared_ptr<const ProblemInstance> instance_ptr() const { return instance_; }

    std::size_t part_count() const { return instance_->part_count(); }

    /// g_i as indices into instance().options(i).
    const std::vector<std::size_t>& reduced(std::size_t part) const { return g_[part]; }
    const SiteSupplier& option(std::size_t part, std::size_t g_index) const {
        return instance_->options(part)[g_[part][g_index]];
    }
    std::size_t option_count(std::size_t part) const { return g_[part].size(); }
    std::size_t total_option_count() const;

    /// K_i and V_i over the reduced set.
    const std::vector<std::size_t>& sites(std::size_t part) const { return sites_[part]; }
    const std::vector<std::size_t>& regions(std::size_t part) const { return regions_[part]; }
    /// Single reachable site: the secondary source coincides with the primary.
    bool aliased(std::size_t part) const { return sites_[part].size() == 1; }
    bool forced(std::size_t part) const { return g_[part].size() == 1; }
    bool reachable(std::size_t part, std::size_t from_site, std::size_t to_site) const {
        return reach_[part][from_site][to_site];
    }

    const KpiScales& scales() const { return scales_; }

    /// Route table for w̄, computed once per weight vector (rounded to 12 decimals).
    std::shared_ptr<const RouteTable> routes(const std::array<double, 3>& w) const;

private:
    ReducedInstance() = default;

    std::shared_ptr<const ProblemInstance> instance_;
    std::vector<std::vector<std::vector<bool>>> reach_;
    std::vector<std::vector<std::size_t>> g_;
    std::vector<std::vector<std::size_t>> sites_;
    std::vector<std::vector<std::size_t>> regions_;
    KpiScales scales_;

    mutable std::mutex cache_mutex_;
    mutable std::map<std::array<long long, 3>, std::shared_ptr<const RouteTable>> cache_;
};

}  // namespace chainopt
