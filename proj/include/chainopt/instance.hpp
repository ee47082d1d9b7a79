#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chainopt {

/// Raised for malformed instance files and violated data invariants.
class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when the product breakdown structure is not a tree.
class StructureError : public InstanceError {
public:
    using InstanceError::InstanceError;
};

struct Part {
    std::string id;
    double value = 1.0;   // abstract currency
    double volume = 1.0;  // cubic meters
    std::optional<std::string> parent;
    double alpha = 1.0;  // primary source share

    bool operator==(const Part&) const = default;
};

struct Site {
    std::string id;
    std::string region;
    int ws_min = 0;
    int ws_max = 100;

    bool operator==(const Site&) const = default;
};

struct Supplier {
    std::string id;
    int ws_min = 0;
    int ws_max = 100;
    int ws_target = 0;

    bool operator==(const Supplier&) const = default;
};

struct TransportMethod {
    std::string id;
    std::string part;
    std::string from;
    std::string to;
    std::array<double, 3> cost{};  // emissions, cost, time
    double cargo_volume = 1.0;

    bool operator==(const TransportMethod&) const = default;
};

struct FeasibleOption {
    std::string part;
    std::string site;
    std::string supplier;
    double production_time = 0.0;  // carried along, never used by the objectives

    bool operator==(const FeasibleOption&) const = default;
};

/// Id-based instance exactly as stored on disk.
struct InstanceData {
    std::vector<Part> parts;
    std::vector<Site> sites;
    std::vector<std::string> warehouses;
    std::vector<Supplier> suppliers;
    std::vector<std::string> regions;
    std::vector<TransportMethod> transport;
    std::vector<FeasibleOption> feasible;

    bool operator==(const InstanceData&) const = default;
};

/// A (site, supplier) pair a part can be produced with, in dense indices.
struct SiteSupplier {
    std::size_t site = 0;
    std::size_t supplier = 0;
    double production_time = 0.0;

    bool operator==(const SiteSupplier& o) const { return site == o.site && supplier == o.supplier; }
};

struct MethodRef {
    std::size_t part = 0;
    std::size_t from = 0;  // node index: sites first, then warehouses
    std::size_t to = 0;
    std::array<double, 3> cost{};
    double cargo_volume = 1.0;
};

/// Validated instance with dense indices. Immutable after construction.
class ProblemInstance {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit ProblemInstance(InstanceData data);

    const InstanceData& data() const { return data_; }

    std::size_t part_count() const { return data_.parts.size(); }
    std::size_t site_count() const { return data_.sites.size(); }
    std::size_t warehouse_count() const { return data_.warehouses.size(); }
    std::size_t node_count() const { return site_count() + warehouse_count(); }
    std::size_t supplier_count() const { return data_.suppliers.size(); }
    std::size_t region_count() const { return data_.regions.size(); }
    std::size_t method_count() const { return methods_.size(); }

    const Part& part(std::size_t i) const { return data_.parts[i]; }
    const Site& site(std::size_t k) const { return data_.sites[k]; }
    const Supplier& supplier(std::size_t u) const { return data_.suppliers[u]; }

    std::size_t parent(std::size_t i) const { return parent_[i]; }
    std::size_t root() const { return root_; }
    const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
    int level(std::size_t i) const { return level_[i]; }
    int max_level() const;
    int min_level() const;

    /// Relative value v_i in percent; sums to 100 over all parts.
    double relative_value(std::size_t i) const { return relative_value_[i]; }
    double total_value() const { return total_value_; }

    std::size_t site_region(std::size_t k) const { return site_region_[k]; }

    const MethodRef& method(std::size_t m) const { return methods_[m]; }
    const std::vector<std::size_t>& methods_of_part(std::size_t i) const { return methods_by_part_[i]; }

    /// Feasible site-supplier combinations f_i.
    const std::vector<SiteSupplier>& options(std::size_t i) const { return options_[i]; }

    /// True when no route connects two distinct sites for this part.
    bool immobile(std::size_t i) const { return immobile_[i]; }

    std::size_t part_index(std::string_view id) const;
    std::size_t site_index(std::string_view id) const;
    std::size_t supplier_index(std::string_view id) const;
    /// Node index of a site or warehouse id.
    std::size_t node_index(std::string_view id) const;
    std::string node_id(std::size_t node) const;

    bool operator==(const ProblemInstance& o) const { return data_ == o.data_; }

private:
    void validate_and_index();

    InstanceData data_;
    std::map<std::string, std::size_t, std::less<>> part_ix_, site_ix_, supplier_ix_, node_ix_, region_ix_;
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<int> level_;
    std::size_t root_ = 0;
    std::vector<double> relative_value_;
    double total_value_ = 0.0;
    std::vector<std::size_t> site_region_;
    std::vector<MethodRef> methods_;
    std::vector<std::vector<std::size_t>> methods_by_part_;
    std::vector<std::vector<SiteSupplier>> options_;
    std::vector<bool> immobile_;
};

/// PBS level per part id: the root has level 0, every child one more than its parent.
std::map<std::string, int> part_levels(const InstanceData& data);

ProblemInstance parse_instance(std::string_view json_text);
ProblemInstance load_instance(const std::filesystem::path& path);
std::string instance_to_json(const InstanceData& data);
void save_instance(const ProblemInstance& instance, const std::filesystem::path& path);

}  // namespace chainopt
