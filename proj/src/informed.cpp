#include "chainopt/informed.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace chainopt {

namespace {

int source_count(const QuboModel& m, std::size_t part) {
    return m.reduced().aliased(part) ? 1 : 2;
}

/// Workshare added by placing (part, source); aliased parts carry both sources at once.
std::int64_t added_share(const QuboModel& m, std::size_t part, int source) {
    if (m.reduced().aliased(part)) {
        return m.rational().workshare(part, 0) + m.rational().workshare(part, 1);
    }
    return m.rational().workshare(part, source);
}

bool route_ok(const ReducedInstance& red, std::size_t child, std::size_t from, std::size_t to) {
    return red.reachable(child, from, to);
}

/// Structural compatibility only (no workshare), listing assigned (part, source) pairs that block it.
bool structurally_ok(const Assignment& a, std::size_t i, int src, std::size_t o,
                     std::vector<std::pair<std::size_t, int>>* blockers) {
    const QuboModel& m = a.model();
    const ReducedInstance& red = m.reduced();
    const ProblemInstance& inst = m.instance();
    const std::size_t k = red.option(i, o).site;
    bool ok = true;
    auto block = [&](std::size_t part, int s) {
        ok = false;
        if (blockers) {
            blockers->emplace_back(part, s);
        }
    };
    if (!red.aliased(i)) {
        const int other = 1 - src;
        if (a.assigned(i, other)) {
            const std::size_t k2 = a.site(i, other);
            if (k2 == k || (red.regions(i).size() >= 2 && inst.site_region(k2) == inst.site_region(k))) {
                block(i, other);
            }
        }
    }
    if (i != inst.root()) {
        const std::size_t j = inst.parent(i);
        for (int b = 0; b < 2; ++b) {
            if (a.assigned(j, b) && !route_ok(red, i, k, a.site(j, b))) {
                block(j, b);
            }
        }
    }
    for (std::size_t c : inst.children(i)) {
        for (int b = 0; b < 2; ++b) {
            if (a.assigned(c, b) && !route_ok(red, c, a.site(c, b), k)) {
                block(c, b);
            }
        }
    }
    return ok;
}

bool headroom_ok(const Assignment& a, std::size_t i, int src, std::size_t o) {
    const QuboModel& m = a.model();
    const SiteSupplier& opt = m.reduced().option(i, o);
    const std::int64_t w = added_share(m, i, src);
    return a.site_load(opt.site) + w <= m.site_window(opt.site).upper &&
           a.supplier_load(opt.supplier) + w <= m.supplier_window(opt.supplier).upper;
}

bool helps_underassigned(const Assignment& a, std::size_t i, std::size_t o) {
    const QuboModel& m = a.model();
    const SiteSupplier& opt = m.reduced().option(i, o);
    return a.site_load(opt.site) < m.site_window(opt.site).lower ||
           a.supplier_load(opt.supplier) < m.supplier_window(opt.supplier).lower;
}

bool upper_bounds_met(const Assignment& a) {
    const QuboModel& m = a.model();
    for (std::size_t k = 0; k < m.instance().site_count(); ++k) {
        if (a.site_load(k) > m.site_window(k).upper) {
            return false;
        }
    }
    for (std::size_t u = 0; u < m.instance().supplier_count(); ++u) {
        if (a.supplier_load(u) > m.supplier_window(u).upper) {
            return false;
        }
    }
    return true;
}

/// Parts grouped by level, each level shuffled; ascending or descending level order.
std::vector<std::size_t> level_order(const ProblemInstance& inst, Rng& rng, bool ascending) {
    std::vector<std::size_t> order(inst.part_count());
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return ascending ? inst.level(x) < inst.level(y) : inst.level(x) > inst.level(y);
    });
    return order;
}

}  // namespace

bool option_compatible(const Assignment& a, std::size_t part, int source, std::size_t option) {
    return structurally_ok(a, part, source, option, nullptr) && headroom_ok(a, part, source, option);
}

bool lower_bounds_met(const Assignment& a) {
    const QuboModel& m = a.model();
    for (std::size_t k = 0; k < m.instance().site_count(); ++k) {
        if (a.site_load(k) < m.site_window(k).lower) {
            return false;
        }
    }
    for (std::size_t u = 0; u < m.instance().supplier_count(); ++u) {
        if (a.supplier_load(u) < m.supplier_window(u).lower) {
            return false;
        }
    }
    return true;
}

Solution finalize(const Assignment& a) {
    const QuboModel& m = a.model();
    AncillaFill fill = ancilla_fill(m, a.to_bits());
    if (!fill.ok) {
        throw ContractError("assignment violates a workshare window");
    }
    return make_solution(m, std::move(fill.x));
}

Assignment isg_assignment(const QuboModel& model, Rng& rng, int max_restarts) {
    const ReducedInstance& red = model.reduced();
    for (int attempt = 0; attempt < std::max(1, max_restarts); ++attempt) {
        Assignment a(model);
        bool dead_end = false;
        for (std::size_t i : level_order(model.instance(), rng, true)) {
            for (int src = 0; src < source_count(model, i) && !dead_end; ++src) {
                std::vector<std::size_t> cand;
                for (std::size_t o = 0; o < red.option_count(i); ++o) {
                    if (option_compatible(a, i, src, o)) {
                        cand.push_back(o);
                    }
                }
                if (cand.empty()) {
                    dead_end = true;
                    break;
                }
                a.assign(i, src, cand[uniform_index(rng, cand.size())]);
            }
            if (dead_end) {
                break;
            }
        }
        if (!dead_end && lower_bounds_met(a)) {
            return a;
        }
    }
    throw GenerationFailure("no feasible assignment found after " + std::to_string(max_restarts) + " restarts");
}

Solution isg(const QuboModel& model, Rng& rng, int max_restarts) {
    return finalize(isg_assignment(model, rng, max_restarts));
}

Assignment decode_lenient(const QuboModel& model, const BitVector& x, Rng& rng) {
    const ReducedInstance& red = model.reduced();
    const VariableLayout& lay = model.layout();
    Assignment a(model);
    for (std::size_t i = 0; i < red.part_count(); ++i) {
        if (lay.folded(i)) {
            a.assign(i, 0, 0);
            continue;
        }
        for (int src = 0; src < source_count(model, i); ++src) {
            std::vector<std::size_t> ones;
            for (std::size_t o = 0; o < red.option_count(i); ++o) {
                if (x[lay.index(i, o, src)]) {
                    ones.push_back(o);
                }
            }
            if (!ones.empty()) {
                a.assign(i, src, ones[uniform_index(rng, ones.size())]);
            }
        }
    }
    return a;
}

namespace {

class Fixer {
public:
    Fixer(Assignment& a, Rng& rng) : a_(a), m_(a.model()), red_(m_.reduced()), inst_(m_.instance()), rng_(rng) {}

    void unassign_overassigned() {
        for (std::size_t k = 0; k < inst_.site_count(); ++k) {
            while (a_.site_load(k) > m_.site_window(k).upper) {
                if (!drop_random([&](std::size_t i, int s) { return a_.site(i, s) == k; })) {
                    break;
                }
            }
        }
        for (std::size_t u = 0; u < inst_.supplier_count(); ++u) {
            while (a_.supplier_load(u) > m_.supplier_window(u).upper) {
                if (!drop_random([&](std::size_t i, int s) { return a_.supplier(i, s) == u; })) {
                    break;
                }
            }
        }
    }

    /// Unassigns sources that clash with their neighbors or their sibling source, deepest parts first.
    void unassign_wrongful(const std::vector<std::size_t>& order) {
        for (std::size_t i : order) {
            const int first = source_count(m_, i) == 2 && uniform01(rng_) < 0.5 ? 0 : 1;
            for (int step = 0; step < 2; ++step) {
                const int src = step == 0 ? first : 1 - first;
                if (src >= source_count(m_, i) || !a_.assigned(i, src)) {
                    continue;
                }
                const std::size_t o = a_.option(i, src);
                a_.unassign(i, src);
                if (structurally_ok(a_, i, src, o, nullptr)) {
                    a_.assign(i, src, o);
                }
            }
        }
    }

    void reassign(const std::vector<std::size_t>& order) {
        for (std::size_t i : order) {
            if (!red_.aliased(i) && a_.assigned(i, 0) != a_.assigned(i, 1)) {
                place_jointly(i);
            }
            for (int src = 0; src < source_count(m_, i); ++src) {
                if (a_.assigned(i, src)) {
                    continue;
                }
                std::vector<std::size_t> cand, preferred;
                for (std::size_t o = 0; o < red_.option_count(i); ++o) {
                    if (option_compatible(a_, i, src, o)) {
                        cand.push_back(o);
                        if (helps_underassigned(a_, i, o)) {
                            preferred.push_back(o);
                        }
                    }
                }
                const auto& pool = preferred.empty() ? cand : preferred;
                if (!pool.empty()) {
                    a_.assign(i, src, pool[uniform_index(rng_, pool.size())]);
                } else {
                    escalate(i, src);
                }
            }
        }
    }

    /// Moves one source onto an under-assigned site or supplier.
    void feed_underassigned() {
        std::vector<std::pair<bool, std::size_t>> under;
        for (std::size_t k = 0; k < inst_.site_count(); ++k) {
            if (a_.site_load(k) < m_.site_window(k).lower) {
                under.emplace_back(true, k);
            }
        }
        for (std::size_t u = 0; u < inst_.supplier_count(); ++u) {
            if (a_.supplier_load(u) < m_.supplier_window(u).lower) {
                under.emplace_back(false, u);
            }
        }
        if (under.empty()) {
            return;
        }
        const auto [is_site, entity] = under[uniform_index(rng_, under.size())];
        struct Move {
            std::size_t part;
            int source;
            std::size_t option;
        };
        std::vector<Move> moves, safe, forced;
        for (std::size_t i = 0; i < red_.part_count(); ++i) {
            if (red_.forced(i)) {
                continue;
            }
            for (int src = 0; src < source_count(m_, i); ++src) {
                if (!a_.assigned(i, src)) {
                    continue;
                }
                const std::size_t old = a_.option(i, src);
                a_.unassign(i, src);
                for (std::size_t o = 0; o < red_.option_count(i); ++o) {
                    const SiteSupplier& opt = red_.option(i, o);
                    if (o != old && (is_site ? opt.site : opt.supplier) == entity && structurally_ok(a_, i, src, o, nullptr)) {
                        forced.push_back(Move{i, src, o});
                    }
                    if (o != old && (is_site ? opt.site : opt.supplier) == entity && option_compatible(a_, i, src, o)) {
                        moves.push_back(Move{i, src, o});
                        // donors that stay above their own lower bound
                        const SiteSupplier& prev = red_.option(i, old);
                        const bool site_ok = opt.site == prev.site ||
                                             a_.site_load(prev.site) >= m_.site_window(prev.site).lower;
                        const bool sup_ok = opt.supplier == prev.supplier ||
                                            a_.supplier_load(prev.supplier) >= m_.supplier_window(prev.supplier).lower;
                        if (site_ok && sup_ok) {
                            safe.push_back(moves.back());
                        }
                    }
                }
                a_.assign(i, src, old);
            }
        }
        if (safe.empty() && moves.empty() && move_part_onto(is_site, entity)) {
            return;
        }
        // without a move that respects every upper bound, overload someone; the next pass drains it
        const auto& pool = !safe.empty() ? safe : (!moves.empty() ? moves : forced);
        if (!pool.empty()) {
            const Move mv = pool[uniform_index(rng_, pool.size())];
            a_.assign(mv.part, mv.source, mv.option);
        }
    }

private:
    /// Re-places both sources of one part so that one of them lands on the entity.
    bool move_part_onto(bool is_site, std::size_t entity) {
        std::vector<std::pair<std::size_t, std::array<std::size_t, 2>>> found;
        for (std::size_t i = 0; i < red_.part_count(); ++i) {
            if (red_.forced(i) || red_.aliased(i)) {
                continue;
            }
            const std::array<std::size_t, 2> old{a_.option(i, 0), a_.option(i, 1)};
            a_.unassign(i, 0);
            a_.unassign(i, 1);
            for (std::size_t o1 = 0; o1 < red_.option_count(i); ++o1) {
                if (!option_compatible(a_, i, 0, o1)) {
                    continue;
                }
                a_.assign(i, 0, o1);
                for (std::size_t o2 = 0; o2 < red_.option_count(i); ++o2) {
                    const auto on = [&](std::size_t o) {
                        const SiteSupplier& opt = red_.option(i, o);
                        return (is_site ? opt.site : opt.supplier) == entity;
                    };
                    if ((on(o1) || on(o2)) && option_compatible(a_, i, 1, o2)) {
                        found.push_back({i, {o1, o2}});
                    }
                }
                a_.unassign(i, 0);
            }
            a_.assign(i, 0, old[0]);
            a_.assign(i, 1, old[1]);
        }
        if (found.empty()) {
            return false;
        }
        const auto& [i, c] = found[uniform_index(rng_, found.size())];
        a_.unassign(i, 0);
        a_.unassign(i, 1);
        a_.assign(i, 0, c[0]);
        a_.assign(i, 1, c[1]);
        return true;
    }

    /// Re-places both sources of a half-assigned part together, so a swap of the two counts as one move.
    void place_jointly(std::size_t i) {
        const int kept = a_.assigned(i, 0) ? 0 : 1;
        const std::size_t old = a_.option(i, kept);
        a_.unassign(i, kept);
        std::vector<std::array<std::size_t, 2>> cand, preferred;
        for (std::size_t o1 = 0; o1 < red_.option_count(i); ++o1) {
            if (!option_compatible(a_, i, 0, o1)) {
                continue;
            }
            a_.assign(i, 0, o1);
            for (std::size_t o2 = 0; o2 < red_.option_count(i); ++o2) {
                if (option_compatible(a_, i, 1, o2)) {
                    cand.push_back({o1, o2});
                    if (helps_underassigned(a_, i, o1) || helps_underassigned(a_, i, o2)) {
                        preferred.push_back({o1, o2});
                    }
                }
            }
            a_.unassign(i, 0);
        }
        const auto& pool = preferred.empty() ? cand : preferred;
        if (pool.empty()) {
            a_.assign(i, kept, old);
            return;
        }
        const auto c = pool[uniform_index(rng_, pool.size())];
        a_.assign(i, 0, c[0]);
        a_.assign(i, 1, c[1]);
    }

    template <typename Pred>
    bool drop_random(Pred on_entity) {
        std::vector<std::pair<std::size_t, int>> holders;
        for (std::size_t i = 0; i < red_.part_count(); ++i) {
            if (red_.forced(i)) {
                continue;
            }
            for (int s = 0; s < source_count(m_, i); ++s) {
                bool hit = false;
                for (int t = 0; t < 2; ++t) {
                    // aliased parts sit on the entity with both sources
                    if (a_.assigned(i, t) && (t == s || red_.aliased(i)) && on_entity(i, t)) {
                        hit = true;
                    }
                }
                if (hit) {
                    holders.emplace_back(i, s);
                }
            }
        }
        if (holders.empty()) {
            return false;
        }
        const auto [i, s] = holders[uniform_index(rng_, holders.size())];
        a_.unassign(i, s);
        return true;
    }

    void escalate(std::size_t i, int src) {
        // cheapest structural unblocking, first among options that fit the workshare bounds, then among all
        for (bool need_headroom : {true, false}) {
            std::size_t best = static_cast<std::size_t>(-1);
            std::vector<std::size_t> best_opts;
            for (std::size_t o = 0; o < red_.option_count(i); ++o) {
                if (need_headroom && !headroom_ok(a_, i, src, o)) {
                    continue;
                }
                std::vector<std::pair<std::size_t, int>> blockers;
                structurally_ok(a_, i, src, o, &blockers);
                std::sort(blockers.begin(), blockers.end());
                blockers.erase(std::unique(blockers.begin(), blockers.end()), blockers.end());
                // displacing the sibling source only moves the problem next door
                const bool sibling = std::any_of(blockers.begin(), blockers.end(),
                                                 [&](const auto& b) { return b.first == i; });
                if (sibling && need_headroom) {
                    continue;
                }
                const std::size_t cost = blockers.size() + (sibling ? red_.part_count() * 2 : 0);
                if (cost < best) {
                    best = cost;
                    best_opts.clear();
                }
                if (cost == best) {
                    best_opts.push_back(o);
                }
            }
            if (best_opts.empty()) {
                continue;
            }
            const std::size_t o = best_opts[uniform_index(rng_, best_opts.size())];
            std::vector<std::pair<std::size_t, int>> blockers;
            structurally_ok(a_, i, src, o, &blockers);
            for (auto [p, s] : blockers) {
                a_.unassign(p, s);
            }
            if (!need_headroom || option_compatible(a_, i, src, o)) {
                // an overloaded entity is drained by the next pass
                a_.assign(i, src, o);
                return;
            }
        }
    }

    Assignment& a_;
    const QuboModel& m_;
    const ReducedInstance& red_;
    const ProblemInstance& inst_;
    Rng& rng_;
};

bool fully_feasible(const Assignment& a) {
    return a.complete() && upper_bounds_met(a) && lower_bounds_met(a) &&
           check_assignment(a.model().reduced(), a.model().rational(), a.choice()).feasible;
}

}  // namespace

IsfResult isf(const QuboModel& model, const BitVector& x, int budget, Rng& rng) {
    if (x.size() != model.size()) {
        throw ContractError("solution length does not match model size");
    }
    Assignment a = decode_lenient(model, x, rng);
    Fixer fixer(a, rng);
    IsfResult res;
    for (int it = 0; it <= budget; ++it) {
        if (fully_feasible(a)) {
            res.ok = true;
            res.iterations = it;
            res.solution = finalize(a);
            return res;
        }
        if (it == budget) {
            break;
        }
        fixer.unassign_overassigned();
        const auto order = level_order(model.instance(), rng, false);
        fixer.unassign_wrongful(order);
        fixer.reassign(order);
        if (a.complete() && !lower_bounds_met(a)) {
            fixer.feed_underassigned();
        }
    }
    res.iterations = budget;
    return res;
}

IsiResult isi(const QuboModel& model, const BitVector& x, int iterations, double stop_prob, Rng& rng) {
    Assignment a(model);
    if (!decode_strict(model, x, a) || !check_assignment(model.reduced(), model.rational(), a.choice()).feasible) {
        throw ContractError("improvement requires a feasible input");
    }
    const ReducedInstance& red = model.reduced();
    IsiResult res;
    double current = assignment_objective(model, a);
    res.initial = current;
    for (int it = 0; it < iterations; ++it) {
        const std::size_t i = uniform_index(rng, red.part_count());
        const std::array<std::size_t, 2> old{a.option(i, 0), a.option(i, 1)};
        a.unassign(i, 0);
        a.unassign(i, 1);
        std::vector<std::array<std::size_t, 2>> combos;
        for (std::size_t o1 = 0; o1 < red.option_count(i); ++o1) {
            if (!option_compatible(a, i, 0, o1)) {
                continue;
            }
            a.assign(i, 0, o1);
            if (red.aliased(i)) {
                if (lower_bounds_met(a)) {
                    combos.push_back({o1, o1});
                }
            } else {
                for (std::size_t o2 = 0; o2 < red.option_count(i); ++o2) {
                    if (!option_compatible(a, i, 1, o2)) {
                        continue;
                    }
                    a.assign(i, 1, o2);
                    if (lower_bounds_met(a)) {
                        combos.push_back({o1, o2});
                    }
                    a.unassign(i, 1);
                }
            }
            a.unassign(i, 0);
        }
        auto place = [&](const std::array<std::size_t, 2>& c) {
            a.unassign(i, 0);
            a.unassign(i, 1);
            a.assign(i, 0, c[0]);
            if (!red.aliased(i)) {
                a.assign(i, 1, c[1]);
            }
        };
        std::array<std::size_t, 2> best = old;
        shuffle(combos, rng);
        for (const auto& c : combos) {
            if (c == best) {
                continue;
            }
            place(c);
            const double obj = assignment_objective(model, a);
            if (obj < current - 1e-12) {
                current = obj;
                best = c;
                ++res.accepted;
                if (uniform01(rng) < stop_prob) {
                    break;
                }
            }
        }
        place(best);
        res.trace.push_back(current);
    }
    res.solution = finalize(a);
    return res;
}

}  // namespace chainopt
