#include "chainopt/assignment.hpp"

#include <algorithm>

#include "json.hpp"

namespace chainopt {

Assignment::Assignment(const QuboModel& model)
    : model_(&model),
      choice_(model.reduced().part_count(), {none, none}),
      site_load_(model.instance().site_count(), 0),
      supplier_load_(model.instance().supplier_count(), 0) {}

bool Assignment::complete() const {
    return std::all_of(choice_.begin(), choice_.end(),
                       [](const auto& c) { return c[0] != none && c[1] != none; });
}

std::size_t Assignment::site(std::size_t part, int source) const {
    return model_->reduced().option(part, choice_[part][source]).site;
}

std::size_t Assignment::supplier(std::size_t part, int source) const {
    return model_->reduced().option(part, choice_[part][source]).supplier;
}

void Assignment::apply(std::size_t part, int source, std::size_t option, int sign) {
    const SiteSupplier& opt = model_->reduced().option(part, option);
    const std::int64_t w = sign * model_->rational().workshare(part, source);
    site_load_[opt.site] += w;
    supplier_load_[opt.supplier] += w;
}

void Assignment::assign(std::size_t part, int source, std::size_t option) {
    if (model_->reduced().aliased(part)) {
        unassign(part, 0);
        for (int a = 0; a < 2; ++a) {
            choice_[part][a] = option;
            apply(part, a, option, +1);
        }
        return;
    }
    unassign(part, source);
    choice_[part][source] = option;
    apply(part, source, option, +1);
}

void Assignment::unassign(std::size_t part, int source) {
    const bool aliased = model_->reduced().aliased(part);
    for (int a = 0; a < 2; ++a) {
        if ((aliased || a == source) && choice_[part][a] != none) {
            apply(part, a, choice_[part][a], -1);
            choice_[part][a] = none;
        }
    }
}

BitVector Assignment::to_bits() const {
    const VariableLayout& lay = model_->layout();
    BitVector x(lay.size(), 0);
    for (std::size_t i = 0; i < choice_.size(); ++i) {
        for (int a = 0; a < 2; ++a) {
            if (choice_[i][a] == none) {
                continue;
            }
            std::size_t idx = lay.index(i, choice_[i][a], a);
            if (idx != VariableLayout::npos) {
                x[idx] = 1;
            }
        }
    }
    return x;
}

bool decode_strict(const QuboModel& model, const BitVector& x, Assignment& out) {
    const ReducedInstance& red = model.reduced();
    const VariableLayout& lay = model.layout();
    out = Assignment(model);
    for (std::size_t i = 0; i < red.part_count(); ++i) {
        if (lay.folded(i)) {
            out.assign(i, 0, 0);
            continue;
        }
        const int sources = red.aliased(i) ? 1 : 2;
        for (int a = 0; a < sources; ++a) {
            std::size_t chosen = Assignment::none;
            for (std::size_t o = 0; o < red.option_count(i); ++o) {
                if (x[lay.index(i, o, a)]) {
                    if (chosen != Assignment::none) {
                        return false;
                    }
                    chosen = o;
                }
            }
            if (chosen == Assignment::none) {
                return false;
            }
            out.assign(i, a, chosen);
        }
    }
    return true;
}

FeasibilityReport check_assignment(const ReducedInstance& red, const RationalApprox& ra, const Choice& choice) {
    const ProblemInstance& inst = red.instance();
    FeasibilityReport rep;
    auto violation = [&](std::string what) {
        rep.feasible = false;
        rep.violations.push_back(std::move(what));
    };
    for (std::size_t i = 0; i < red.part_count(); ++i) {
        const std::string& id = inst.part(i).id;
        if (choice[i][0] == Assignment::none || choice[i][1] == Assignment::none) {
            violation("part '" + id + "' is not fully assigned");
            continue;
        }
        if (choice[i][0] >= red.option_count(i) || choice[i][1] >= red.option_count(i)) {
            violation("part '" + id + "' uses an option outside its reduced set");
            continue;
        }
        const std::size_t k0 = red.option(i, choice[i][0]).site;
        const std::size_t k1 = red.option(i, choice[i][1]).site;
        if (red.sites(i).size() == 1) {
            if (choice[i][0] != choice[i][1]) {
                violation("part '" + id + "' has a single site but different source options");
            }
        } else {
            if (k0 == k1) {
                violation("part '" + id + "' uses the same site for both sources");
            }
            if (red.regions(i).size() >= 2 && inst.site_region(k0) == inst.site_region(k1)) {
                violation("part '" + id + "' uses the same region for both sources");
            }
        }
    }
    if (!rep.feasible) {
        return rep;
    }
    for (std::size_t i = 0; i < red.part_count(); ++i) {
        if (i == inst.root()) {
            continue;
        }
        const std::size_t j = inst.parent(i);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const std::size_t k = red.option(i, choice[i][a]).site;
                const std::size_t l = red.option(j, choice[j][b]).site;
                if (!red.reachable(i, k, l)) {
                    violation("part '" + inst.part(i).id + "' cannot be shipped from " + inst.site(k).id + " to " +
                              inst.site(l).id);
                }
            }
        }
    }
    std::vector<std::int64_t> site_load(inst.site_count(), 0), sup_load(inst.supplier_count(), 0);
    for (std::size_t i = 0; i < red.part_count(); ++i) {
        for (int a = 0; a < 2; ++a) {
            const SiteSupplier& opt = red.option(i, choice[i][a]);
            const std::int64_t share = ra.P[i] * (a == 0 ? ra.P_bar[i] : ra.R_bar - ra.P_bar[i]);
            site_load[opt.site] += share;
            sup_load[opt.supplier] += share;
        }
    }
    const std::int64_t unit = static_cast<std::int64_t>(ra.R) * ra.R_bar;
    for (std::size_t k = 0; k < inst.site_count(); ++k) {
        const Site& s = inst.site(k);
        if (site_load[k] < s.ws_min * unit || site_load[k] > s.ws_max * unit) {
            violation("site '" + s.id + "' workshare outside its window");
        }
    }
    for (std::size_t u = 0; u < inst.supplier_count(); ++u) {
        const Supplier& s = inst.supplier(u);
        if (sup_load[u] < s.ws_min * unit || sup_load[u] > s.ws_max * unit) {
            violation("supplier '" + s.id + "' workshare outside its window");
        }
    }
    return rep;
}

FeasibilityReport check_solution(const QuboModel& model, const BitVector& x) {
    Assignment a(model);
    if (x.size() != model.size() || !decode_strict(model, x, a)) {
        FeasibilityReport rep;
        rep.feasible = false;
        rep.violations.push_back("assignment variables are not one-hot per part and source");
        return rep;
    }
    return check_assignment(model.reduced(), model.rational(), a.choice());
}

std::array<double, 4> assignment_kpis(const QuboModel& model, const Assignment& a) {
    const ProblemInstance& inst = model.instance();
    const KpiScales& sc = model.reduced().scales();
    std::array<double, 4> kpi{};
    std::array<double, 3> transport{};
    for (std::size_t i = 0; i < a.part_count(); ++i) {
        if (i == inst.root()) {
            continue;
        }
        const std::size_t j = inst.parent(i);
        for (int s = 0; s < 2; ++s) {
            for (int b = 0; b < 2; ++b) {
                const Route* r = model.routes().find(i, a.site(i, s), a.site(j, b));
                if (!r) {
                    continue;
                }
                for (int n = 0; n < 3; ++n) {
                    transport[n] += model.share(i, s) * r->contribution[n];
                }
            }
        }
    }
    for (int n = 0; n < 3; ++n) {
        kpi[n] = transport[n] / sc.d[n];
    }
    std::vector<double> share(inst.supplier_count(), 0.0);
    for (std::size_t i = 0; i < a.part_count(); ++i) {
        for (int s = 0; s < 2; ++s) {
            share[a.supplier(i, s)] += inst.relative_value(i) * model.share(i, s);
        }
    }
    double c4 = 0.0;
    for (std::size_t u = 0; u < share.size(); ++u) {
        const double dev = share[u] - inst.supplier(u).ws_target;
        c4 += dev * dev;
    }
    kpi[3] = c4 / sc.d[3];
    return kpi;
}

double assignment_objective(const QuboModel& model, const Assignment& a) {
    const auto kpi = assignment_kpis(model, a);
    double total = 0.0;
    for (int n = 0; n < 4; ++n) {
        total += model.weights().w[n] * kpi[n];
    }
    return total;
}

Solution make_solution(const QuboModel& model, BitVector x) {
    Solution s;
    s.eval = evaluate(model, x);
    s.x = std::move(x);
    return s;
}

std::string solution_json(const QuboModel& model, const Solution& s) {
    using nlohmann::ordered_json;
    const ProblemInstance& inst = model.instance();
    ordered_json j;
    ordered_json assignment = ordered_json::object();
    Assignment a(model);
    const bool decoded = decode_strict(model, s.x, a);
    for (std::size_t i = 0; i < inst.part_count(); ++i) {
        ordered_json entry = ordered_json::object();
        for (int src = 0; src < 2; ++src) {
            const char* key = src == 0 ? "primary" : "secondary";
            if (decoded) {
                entry[key] = {{"site", inst.site(a.site(i, src)).id},
                              {"supplier", inst.supplier(a.supplier(i, src)).id}};
            } else {
                entry[key] = nullptr;
            }
        }
        assignment[inst.part(i).id] = std::move(entry);
    }
    j["assignment"] = std::move(assignment);
    j["kpi"] = {{"C1", s.eval.kpi[0]},
                {"C2", s.eval.kpi[1]},
                {"C3", s.eval.kpi[2]},
                {"C4", s.eval.kpi[3]},
                {"objective", s.eval.objective},
                {"penalties", s.eval.penalty},
                {"feasible", s.eval.feasible}};
    std::string bits;
    bits.reserve(s.x.size());
    for (auto b : s.x) {
        bits += b ? '1' : '0';
    }
    j["x"] = bits;
    return j.dump(2) + "\n";
}

}  // namespace chainopt
