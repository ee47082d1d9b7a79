#include "chainopt/instance.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "chainopt/util.hpp"
#include "json.hpp"

namespace chainopt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw InstanceError(what);
}

void check_window(const std::string& kind, const std::string& id, int lo, int hi) {
    if (lo < 0 || hi > 100 || lo > hi) {
        fail(kind + " '" + id + "': workshare window [" + std::to_string(lo) + ", " + std::to_string(hi) +
             "] must satisfy 0 <= ws_min <= ws_max <= 100");
    }
}

template <typename Map>
void insert_unique(Map& map, const std::string& id, std::size_t index, const std::string& kind) {
    if (id.empty()) {
        fail(kind + " with empty id");
    }
    if (!map.emplace(id, index).second) {
        fail("duplicate " + kind + " id '" + id + "'");
    }
}

}  // namespace

ProblemInstance::ProblemInstance(InstanceData data) : data_(std::move(data)) {
    validate_and_index();
}

void ProblemInstance::validate_and_index() {
    const std::size_t n_parts = data_.parts.size();
    if (n_parts == 0) {
        fail("instance has no parts");
    }
    if (data_.sites.empty()) {
        fail("instance has no sites");
    }
    if (data_.suppliers.empty()) {
        fail("instance has no suppliers");
    }

    for (std::size_t r = 0; r < data_.regions.size(); ++r) {
        insert_unique(region_ix_, data_.regions[r], r, "region");
    }
    for (std::size_t i = 0; i < n_parts; ++i) {
        const Part& p = data_.parts[i];
        insert_unique(part_ix_, p.id, i, "part");
        if (!(p.value > 0.0) || !std::isfinite(p.value)) {
            fail("part '" + p.id + "': value must be positive");
        }
        if (!(p.volume > 0.0) || !std::isfinite(p.volume)) {
            fail("part '" + p.id + "': volume must be positive");
        }
        if (!(p.alpha >= 0.5 && p.alpha <= 1.0)) {
            fail("part '" + p.id + "': alpha must lie in [0.5, 1]");
        }
    }
    site_region_.resize(data_.sites.size());
    for (std::size_t k = 0; k < data_.sites.size(); ++k) {
        const Site& s = data_.sites[k];
        insert_unique(site_ix_, s.id, k, "site");
        insert_unique(node_ix_, s.id, k, "site or warehouse");
        auto reg = region_ix_.find(s.region);
        if (reg == region_ix_.end()) {
            fail("site '" + s.id + "': unknown region '" + s.region + "'");
        }
        site_region_[k] = reg->second;
        check_window("site", s.id, s.ws_min, s.ws_max);
    }
    for (std::size_t w = 0; w < data_.warehouses.size(); ++w) {
        insert_unique(node_ix_, data_.warehouses[w], site_count() + w, "site or warehouse");
    }
    for (std::size_t u = 0; u < data_.suppliers.size(); ++u) {
        const Supplier& s = data_.suppliers[u];
        insert_unique(supplier_ix_, s.id, u, "supplier");
        check_window("supplier", s.id, s.ws_min, s.ws_max);
        if (s.ws_target < s.ws_min || s.ws_target > s.ws_max) {
            fail("supplier '" + s.id + "': ws_target must lie within [ws_min, ws_max]");
        }
    }

    // PBS tree
    parent_.assign(n_parts, npos);
    children_.assign(n_parts, {});
    std::size_t roots = 0;
    for (std::size_t i = 0; i < n_parts; ++i) {
        const Part& p = data_.parts[i];
        if (!p.parent) {
            root_ = i;
            ++roots;
            continue;
        }
        auto it = part_ix_.find(*p.parent);
        if (it == part_ix_.end()) {
            fail("part '" + p.id + "': unknown parent '" + *p.parent + "'");
        }
        if (it->second == i) {
            throw StructureError("part '" + p.id + "' is its own parent");
        }
        parent_[i] = it->second;
        children_[it->second].push_back(i);
    }
    if (roots != 1) {
        throw StructureError("product structure must have exactly one root, found " + std::to_string(roots));
    }
    level_.assign(n_parts, -1);
    std::queue<std::size_t> bfs;
    bfs.push(root_);
    level_[root_] = 0;
    std::size_t seen = 0;
    while (!bfs.empty()) {
        std::size_t i = bfs.front();
        bfs.pop();
        ++seen;
        for (std::size_t c : children_[i]) {
            level_[c] = level_[i] + 1;
            bfs.push(c);
        }
    }
    if (seen != n_parts) {
        throw StructureError("product structure contains a cycle detached from the root");
    }

    total_value_ = 0.0;
    for (const Part& p : data_.parts) {
        total_value_ += p.value;
    }
    relative_value_.resize(n_parts);
    for (std::size_t i = 0; i < n_parts; ++i) {
        relative_value_[i] = 100.0 * data_.parts[i].value / total_value_;
    }

    // transport
    methods_by_part_.assign(n_parts, {});
    std::set<std::string> method_ids;
    for (const TransportMethod& t : data_.transport) {
        if (t.id.empty() || !method_ids.insert(t.id).second) {
            fail("duplicate or empty transport id '" + t.id + "'");
        }
        auto pit = part_ix_.find(t.part);
        if (pit == part_ix_.end()) {
            fail("transport '" + t.id + "': unknown part '" + t.part + "'");
        }
        auto from = node_ix_.find(t.from);
        auto to = node_ix_.find(t.to);
        if (from == node_ix_.end()) {
            fail("transport '" + t.id + "': unknown origin '" + t.from + "'");
        }
        if (to == node_ix_.end()) {
            fail("transport '" + t.id + "': unknown destination '" + t.to + "'");
        }
        for (double c : t.cost) {
            if (!(c >= 0.0) || !std::isfinite(c)) {
                fail("transport '" + t.id + "': contributions must be non-negative");
            }
        }
        const Part& part = data_.parts[pit->second];
        if (!(t.cargo_volume >= part.volume) || !std::isfinite(t.cargo_volume)) {
            fail("transport '" + t.id + "': cargo volume smaller than the volume of part '" + part.id + "'");
        }
        if (from->second == to->second && t.cost[0] == 0.0 && t.cost[1] == 0.0 && t.cost[2] == 0.0) {
            fail("transport '" + t.id + "': zero-cost self-loop");
        }
        methods_by_part_[pit->second].push_back(methods_.size());
        methods_.push_back(MethodRef{pit->second, from->second, to->second, t.cost, t.cargo_volume});
    }

    // feasible options
    options_.assign(n_parts, {});
    for (const FeasibleOption& f : data_.feasible) {
        auto pit = part_ix_.find(f.part);
        if (pit == part_ix_.end()) {
            fail("feasible option: unknown part '" + f.part + "'");
        }
        auto sit = site_ix_.find(f.site);
        if (sit == site_ix_.end()) {
            fail("feasible option of part '" + f.part + "': unknown site '" + f.site + "'");
        }
        auto uit = supplier_ix_.find(f.supplier);
        if (uit == supplier_ix_.end()) {
            fail("feasible option of part '" + f.part + "': unknown supplier '" + f.supplier + "'");
        }
        if (!(f.production_time >= 0.0)) {
            fail("feasible option of part '" + f.part + "': negative production time");
        }
        SiteSupplier opt{sit->second, uit->second, f.production_time};
        auto& list = options_[pit->second];
        if (std::find(list.begin(), list.end(), opt) != list.end()) {
            fail("part '" + f.part + "': duplicate feasible option (" + f.site + ", " + f.supplier + ")");
        }
        list.push_back(opt);
    }
    for (std::size_t i = 0; i < n_parts; ++i) {
        if (options_[i].empty()) {
            fail("part '" + data_.parts[i].id + "': no feasible site-supplier combination");
        }
    }

    // immobility: no route between any two distinct sites on the part's graph
    immobile_.assign(n_parts, true);
    for (std::size_t i = 0; i < n_parts; ++i) {
        std::vector<std::vector<std::size_t>> adj(node_count());
        for (std::size_t m : methods_by_part_[i]) {
            adj[methods_[m].from].push_back(methods_[m].to);
        }
        for (std::size_t k = 0; k < site_count() && immobile_[i]; ++k) {
            std::vector<bool> seen_node(node_count(), false);
            std::vector<std::size_t> stack{k};
            seen_node[k] = true;
            while (!stack.empty() && immobile_[i]) {
                std::size_t n = stack.back();
                stack.pop_back();
                for (std::size_t t : adj[n]) {
                    if (!seen_node[t]) {
                        seen_node[t] = true;
                        if (t < site_count() && t != k) {
                            immobile_[i] = false;
                            break;
                        }
                        stack.push_back(t);
                    }
                }
            }
        }
    }
}

int ProblemInstance::max_level() const {
    return *std::max_element(level_.begin(), level_.end());
}

int ProblemInstance::min_level() const {
    return *std::min_element(level_.begin(), level_.end());
}

namespace {

template <typename Map>
std::size_t lookup(const Map& map, std::string_view id, const char* kind) {
    auto it = map.find(id);
    if (it == map.end()) {
        throw InstanceError(std::string("unknown ") + kind + " '" + std::string(id) + "'");
    }
    return it->second;
}

}  // namespace

std::size_t ProblemInstance::part_index(std::string_view id) const { return lookup(part_ix_, id, "part"); }
std::size_t ProblemInstance::site_index(std::string_view id) const { return lookup(site_ix_, id, "site"); }
std::size_t ProblemInstance::supplier_index(std::string_view id) const {
    return lookup(supplier_ix_, id, "supplier");
}
std::size_t ProblemInstance::node_index(std::string_view id) const { return lookup(node_ix_, id, "node"); }

std::string ProblemInstance::node_id(std::size_t node) const {
    return node < site_count() ? data_.sites[node].id : data_.warehouses[node - site_count()];
}

std::map<std::string, int> part_levels(const InstanceData& data) {
    std::map<std::string, std::optional<std::string>> parent_of;
    for (const Part& p : data.parts) {
        parent_of[p.id] = p.parent;
    }
    std::map<std::string, int> levels;
    for (const Part& p : data.parts) {
        // walk to the root; more than |I| steps means a cycle
        int depth = 0;
        std::optional<std::string> cur = p.parent;
        while (cur) {
            auto it = parent_of.find(*cur);
            if (it == parent_of.end()) {
                throw InstanceError("part '" + p.id + "': unknown parent '" + *cur + "'");
            }
            if (++depth > static_cast<int>(data.parts.size())) {
                throw StructureError("cycle in product structure through part '" + p.id + "'");
            }
            cur = it->second;
        }
        levels[p.id] = depth;
    }
    return levels;
}

namespace {

int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

const json& require(const json& obj, const char* key, const std::string& context) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        fail(context + ": missing key '" + key + "'");
    }
    return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& context) {
    const json& v = require(obj, key, context);
    if (!v.is_string()) {
        fail(context + ": '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

double get_number(const json& obj, const char* key, const std::string& context) {
    const json& v = require(obj, key, context);
    if (!v.is_number()) {
        fail(context + ": '" + key + "' must be a number");
    }
    return v.get<double>();
}

int get_percent(const json& obj, const char* key, const std::string& context) {
    const json& v = require(obj, key, context);
    if (!v.is_number_integer() && !(v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())) {
        fail(context + ": '" + key + "' must be an integer percent");
    }
    return static_cast<int>(v.get<double>());
}

const json& get_array(const json& root, const char* key) {
    const json& v = require(root, key, "instance");
    if (!v.is_array()) {
        fail(std::string("instance: '") + key + "' must be an array");
    }
    return v;
}

InstanceData data_from_json(const json& root) {
    if (!root.is_object()) {
        fail("instance: top level must be an object");
    }
    InstanceData d;
    for (const json& p : get_array(root, "parts")) {
        std::string ctx = "part";
        Part part;
        part.id = get_string(p, "id", ctx);
        ctx = "part '" + part.id + "'";
        part.value = get_number(p, "value", ctx);
        part.volume = get_number(p, "volume", ctx);
        part.alpha = get_number(p, "alpha", ctx);
        auto par = p.find("parent");
        if (par != p.end() && !par->is_null()) {
            if (!par->is_string()) {
                fail(ctx + ": 'parent' must be a string or null");
            }
            if (!par->get<std::string>().empty()) {
                part.parent = par->get<std::string>();
            }
        }
        d.parts.push_back(std::move(part));
    }
    for (const json& s : get_array(root, "sites")) {
        Site site;
        site.id = get_string(s, "id", "site");
        std::string ctx = "site '" + site.id + "'";
        site.region = get_string(s, "region", ctx);
        site.ws_min = get_percent(s, "ws_min", ctx);
        site.ws_max = get_percent(s, "ws_max", ctx);
        d.sites.push_back(std::move(site));
    }
    for (const json& w : get_array(root, "warehouses")) {
        if (!w.is_string()) {
            fail("instance: warehouse ids must be strings");
        }
        d.warehouses.push_back(w.get<std::string>());
    }
    for (const json& s : get_array(root, "suppliers")) {
        Supplier sup;
        sup.id = get_string(s, "id", "supplier");
        std::string ctx = "supplier '" + sup.id + "'";
        sup.ws_min = get_percent(s, "ws_min", ctx);
        sup.ws_max = get_percent(s, "ws_max", ctx);
        sup.ws_target = get_percent(s, "ws_target", ctx);
        d.suppliers.push_back(std::move(sup));
    }
    for (const json& r : get_array(root, "regions")) {
        if (!r.is_string()) {
            fail("instance: region ids must be strings");
        }
        d.regions.push_back(r.get<std::string>());
    }
    for (const json& t : get_array(root, "transport")) {
        TransportMethod m;
        m.id = get_string(t, "id", "transport");
        std::string ctx = "transport '" + m.id + "'";
        m.part = get_string(t, "part", ctx);
        m.from = get_string(t, "from", ctx);
        m.to = get_string(t, "to", ctx);
        m.cost = {get_number(t, "c1", ctx), get_number(t, "c2", ctx), get_number(t, "c3", ctx)};
        m.cargo_volume = get_number(t, "cargo_volume", ctx);
        d.transport.push_back(std::move(m));
    }
    for (const json& f : get_array(root, "feasible")) {
        FeasibleOption opt;
        opt.part = get_string(f, "part", "feasible option");
        std::string ctx = "feasible option of part '" + opt.part + "'";
        opt.site = get_string(f, "site", ctx);
        opt.supplier = get_string(f, "supplier", ctx);
        opt.production_time = f.contains("production_time") ? get_number(f, "production_time", ctx) : 0.0;
        d.feasible.push_back(std::move(opt));
    }
    return d;
}

}  // namespace

ProblemInstance parse_instance(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InstanceError("parse error at line " + std::to_string(line_of_offset(json_text, e.byte)) + ": " +
                            e.what());
    }
    return ProblemInstance(data_from_json(root));
}

ProblemInstance load_instance(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::runtime_error& e) {
        throw InstanceError(e.what());
    }
    try {
        return parse_instance(text);
    } catch (const StructureError& e) {
        throw StructureError(path.string() + ": " + e.what());
    } catch (const InstanceError& e) {
        throw InstanceError(path.string() + ": " + e.what());
    }
}

std::string instance_to_json(const InstanceData& d) {
    json root = json::object();
    json parts = json::array();
    for (const Part& p : d.parts) {
        parts.push_back({{"id", p.id},
                         {"value", p.value},
                         {"volume", p.volume},
                         {"parent", p.parent ? json(*p.parent) : json(nullptr)},
                         {"alpha", p.alpha}});
    }
    json sites = json::array();
    for (const Site& s : d.sites) {
        sites.push_back({{"id", s.id}, {"region", s.region}, {"ws_min", s.ws_min}, {"ws_max", s.ws_max}});
    }
    json suppliers = json::array();
    for (const Supplier& s : d.suppliers) {
        suppliers.push_back(
            {{"id", s.id}, {"ws_min", s.ws_min}, {"ws_max", s.ws_max}, {"ws_target", s.ws_target}});
    }
    json transport = json::array();
    for (const TransportMethod& t : d.transport) {
        transport.push_back({{"id", t.id},
                             {"part", t.part},
                             {"from", t.from},
                             {"to", t.to},
                             {"c1", t.cost[0]},
                             {"c2", t.cost[1]},
                             {"c3", t.cost[2]},
                             {"cargo_volume", t.cargo_volume}});
    }
    json feasible = json::array();
    for (const FeasibleOption& f : d.feasible) {
        feasible.push_back(
            {{"part", f.part}, {"site", f.site}, {"supplier", f.supplier}, {"production_time", f.production_time}});
    }
    root["parts"] = std::move(parts);
    root["sites"] = std::move(sites);
    root["warehouses"] = d.warehouses;
    root["suppliers"] = std::move(suppliers);
    root["regions"] = d.regions;
    root["transport"] = std::move(transport);
    root["feasible"] = std::move(feasible);
    return root.dump(2) + "\n";
}

void save_instance(const ProblemInstance& instance, const std::filesystem::path& path) {
    write_file(path, instance_to_json(instance.data()));
}

}  // namespace chainopt
