#include "chainopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "chainopt/util.hpp"
#include "json.hpp"

namespace chainopt {

void Weights::validate() const {
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ModelError("weights must lie in [0, 1]");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ModelError("weights must sum to 1, got " + format_double(sum));
    }
}

void Multipliers::validate() const {
    for (int n = 0; n < 6; ++n) {
        const double l = lambda[n];
        if (!std::isfinite(l) || (n < 4 ? !(l > 0.0) : !(l >= 0.0))) {
            throw ModelError("multiplier lambda" + std::to_string(n + 1) + " is out of range");
        }
    }
}

const char* family_name(WindowFamily f) {
    switch (f) {
        case WindowFamily::SiteMin: return "site_min";
        case WindowFamily::SiteMax: return "site_max";
        case WindowFamily::SupplierMin: return "supplier_min";
        case WindowFamily::SupplierMax: return "supplier_max";
    }
    return "?";
}

const AncillaGroup* VariableLayout::ancilla_group(WindowFamily family, std::size_t entity) const {
    const bool site = family == WindowFamily::SiteMin || family == WindowFamily::SiteMax;
    const auto& table = site ? ancilla_lookup_sites_ : ancilla_lookup_suppliers_;
    if (entity >= table.size()) {
        return nullptr;
    }
    std::size_t ix = table[entity][static_cast<int>(family)];
    return ix == npos ? nullptr : &ancillas_[ix];
}

double QuboModel::share(std::size_t part, int source) const {
    const double a = instance().part(part).alpha;
    return source == 0 ? a : 1.0 - a;
}

int ancilla_bits(std::int64_t value) {
    if (value < 0) {
        throw ModelError("ancilla counter argument is negative");
    }
    int n = 0;
    while ((std::int64_t{1} << n) < value + 1) {
        ++n;
    }
    return n;
}

namespace {

/// A binary literal: a model variable or the constant 1.
struct Lit {
    std::size_t var = VariableLayout::npos;
    bool constant() const { return var == VariableLayout::npos; }
};

class PolyBuilder {
public:
    explicit PolyBuilder(std::size_t n) : linear_(n, 0.0L) {}

    void add_const(long double c) { offset_ += c; }

    void add_linear(Lit a, long double c) {
        if (a.constant()) {
            offset_ += c;
        } else {
            linear_[a.var] += c;
        }
    }

    void add_product(Lit a, Lit b, double c) {
        if (c == 0.0) {
            return;
        }
        if (a.constant()) {
            add_linear(b, c);
        } else if (b.constant()) {
            add_linear(a, c);
        } else if (a.var == b.var) {
            linear_[a.var] += c;
        } else {
            triplets_.push_back(Coupling{static_cast<std::uint32_t>(a.var), static_cast<std::uint32_t>(b.var), c});
        }
    }

    /// scale · (Σ c_t·lit_t + constant)^2, with x^2 = x for binaries.
    void add_square(const std::vector<std::pair<Lit, double>>& terms, double constant, double scale) {
        if (scale == 0.0) {
            return;
        }
        std::map<std::size_t, long double> merged;
        long double c0 = constant;
        for (const auto& [lit, c] : terms) {
            if (lit.constant()) {
                c0 += c;
            } else {
                merged[lit.var] += c;
            }
        }
        std::vector<std::pair<std::size_t, long double>> t(merged.begin(), merged.end());
        for (std::size_t p = 0; p < t.size(); ++p) {
            linear_[t[p].first] += scale * (t[p].second * t[p].second + 2.0L * t[p].second * c0);
            for (std::size_t q = p + 1; q < t.size(); ++q) {
                add_product(Lit{t[p].first}, Lit{t[q].first}, static_cast<double>(2.0L * scale * t[p].second * t[q].second));
            }
        }
        offset_ += scale * c0 * c0;
    }

    Qubo finish() {
        std::vector<double> lin(linear_.begin(), linear_.end());
        const std::size_t n = lin.size();
        return Qubo::from_triplets(n, std::move(triplets_), std::move(lin), static_cast<double>(offset_));
    }

private:
    std::vector<long double> linear_;
    std::vector<Coupling> triplets_;
    long double offset_ = 0.0L;
};

}  // namespace

class ModelCompiler {
public:
    ModelCompiler(std::shared_ptr<const ReducedInstance> reduced, const Weights& w, const Multipliers& l,
                  const CompileOptions& opt) {
        w.validate();
        l.validate();
        m_ = std::make_shared<QuboModel>();
        m_->reduced_ = std::move(reduced);
        m_->weights_ = w;
        m_->multipliers_ = l;
        m_->options_ = opt;
    }

    std::shared_ptr<const QuboModel> run() {
        const ProblemInstance& inst = m_->instance();
        m_->rational_ = m_->options_.share_numerator
                            ? rational_approx_fixed_share(inst, m_->options_.R, m_->options_.R_bar,
                                                          *m_->options_.share_numerator)
                            : rational_approx(inst, m_->options_.R, m_->options_.R_bar);
        m_->routes_ = m_->reduced().routes(m_->weights_.transport());
        build_layout();
        build_windows();
        add_ancillas();
        emit();
        return m_;
    }

private:
    Lit lit(std::size_t i, std::size_t o, int a) const { return Lit{m_->layout_.index_[i][o][a]}; }

    void build_layout() {
        const ReducedInstance& red = m_->reduced();
        VariableLayout& lay = m_->layout_;
        const std::size_t n = red.part_count();
        lay.index_.resize(n);
        lay.folded_.assign(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t g = red.option_count(i);
            lay.index_[i].assign(g, {VariableLayout::npos, VariableLayout::npos});
            if (m_->options_.fold_forced && red.forced(i)) {
                lay.folded_[i] = true;
                continue;
            }
            const int sources = red.aliased(i) ? 1 : 2;
            std::size_t first_group = lay.groups_.size();
            for (int a = 0; a < sources; ++a) {
                lay.groups_.emplace_back();
                lay.group_keys_.emplace_back(i, a);
            }
            for (std::size_t o = 0; o < g; ++o) {
                for (int a = 0; a < sources; ++a) {
                    std::size_t idx = lay.vars_.size();
                    lay.vars_.push_back(AssignmentVar{i, o, a});
                    lay.index_[i][o][a] = idx;
                    lay.groups_[first_group + a].push_back(idx);
                    lay.group_of_.push_back(first_group + a);
                }
                if (sources == 1) {
                    lay.index_[i][o][1] = lay.index_[i][o][0];
                }
            }
        }
    }

    void build_windows() {
        const ProblemInstance& inst = m_->instance();
        const ReducedInstance& red = m_->reduced();
        const RationalApprox& ra = m_->rational_;
        std::vector<std::int64_t> site_all(inst.site_count(), 0), sup_all(inst.supplier_count(), 0);
        for (std::size_t i = 0; i < red.part_count(); ++i) {
            for (std::size_t o = 0; o < red.option_count(i); ++o) {
                const SiteSupplier& opt = red.option(i, o);
                for (int a = 0; a < 2; ++a) {
                    site_all[opt.site] += ra.workshare(i, a);
                    sup_all[opt.supplier] += ra.workshare(i, a);
                }
            }
        }
        auto make = [&](const std::string& kind, const std::string& id, int lo, int hi, std::int64_t all) {
            Window w;
            w.lower = ra.scaled_bound(lo);
            w.upper = ra.scaled_bound(hi);
            if (all < w.lower) {
                throw ModelError(kind + " '" + id + "': minimum workshare exceeds everything assignable to it");
            }
            w.bits_min = ancilla_bits(all - w.lower);
            w.bits_max = ancilla_bits(w.upper);
            return w;
        };
        for (std::size_t k = 0; k < inst.site_count(); ++k) {
            const Site& s = inst.site(k);
            m_->site_windows_.push_back(make("site", s.id, s.ws_min, s.ws_max, site_all[k]));
        }
        for (std::size_t u = 0; u < inst.supplier_count(); ++u) {
            const Supplier& s = inst.supplier(u);
            m_->supplier_windows_.push_back(make("supplier", s.id, s.ws_min, s.ws_max, sup_all[u]));
        }
    }

    void add_ancillas() {
        VariableLayout& lay = m_->layout_;
        std::size_t next = lay.vars_.size();
        const std::array<std::size_t, 4> none{VariableLayout::npos, VariableLayout::npos, VariableLayout::npos,
                                              VariableLayout::npos};
        lay.ancilla_lookup_sites_.assign(m_->site_windows_.size(), none);
        lay.ancilla_lookup_suppliers_.assign(m_->supplier_windows_.size(), none);
        auto push = [&](WindowFamily f, std::size_t entity, int bits, std::array<std::size_t, 4>& slot) {
            slot[static_cast<int>(f)] = lay.ancillas_.size();
            lay.ancillas_.push_back(AncillaGroup{f, entity, next, bits});
            next += static_cast<std::size_t>(bits);
        };
        if (m_->multipliers_.lambda[4] > 0.0) {
            for (std::size_t k = 0; k < m_->site_windows_.size(); ++k) {
                push(WindowFamily::SiteMin, k, m_->site_windows_[k].bits_min, lay.ancilla_lookup_sites_[k]);
                push(WindowFamily::SiteMax, k, m_->site_windows_[k].bits_max, lay.ancilla_lookup_sites_[k]);
            }
        }
        if (m_->multipliers_.lambda[5] > 0.0) {
            for (std::size_t u = 0; u < m_->supplier_windows_.size(); ++u) {
                push(WindowFamily::SupplierMin, u, m_->supplier_windows_[u].bits_min,
                     lay.ancilla_lookup_suppliers_[u]);
                push(WindowFamily::SupplierMax, u, m_->supplier_windows_[u].bits_max,
                     lay.ancilla_lookup_suppliers_[u]);
            }
        }
        lay.ancilla_total_ = next - lay.vars_.size();
    }

    void emit_window(PolyBuilder& pb, const std::vector<std::pair<Lit, double>>& load, const Window& w,
                     const AncillaGroup* g_min, const AncillaGroup* g_max, double lambda) {
        // (p − lower − Σ 2^b z_b)^2 · 2^{−n}
        std::vector<std::pair<Lit, double>> t = load;
        for (int b = 0; g_min && b < g_min->bits; ++b) {
            t.emplace_back(Lit{g_min->first + static_cast<std::size_t>(b)}, -std::ldexp(1.0, b));
        }
        pb.add_square(t, -static_cast<double>(w.lower), lambda * std::ldexp(1.0, -w.bits_min));
        // (upper − p − Σ 2^b z_b)^2 · 2^{−n}
        t.clear();
        for (const auto& [l, c] : load) {
            t.emplace_back(l, -c);
        }
        for (int b = 0; g_max && b < g_max->bits; ++b) {
            t.emplace_back(Lit{g_max->first + static_cast<std::size_t>(b)}, -std::ldexp(1.0, b));
        }
        pb.add_square(t, static_cast<double>(w.upper), lambda * std::ldexp(1.0, -w.bits_max));
    }

    void emit() {
        const ProblemInstance& inst = m_->instance();
        const ReducedInstance& red = m_->reduced();
        const RationalApprox& ra = m_->rational_;
        const Weights& w = m_->weights_;
        const auto& lambda = m_->multipliers_.lambda;
        const KpiScales& sc = red.scales();
        PolyBuilder pb(m_->layout_.size());

        // transport KPIs and forbidden pairs along parent links
        for (std::size_t i = 0; i < red.part_count(); ++i) {
            if (i == inst.root()) {
                continue;
            }
            const std::size_t j = inst.parent(i);
            for (std::size_t o = 0; o < red.option_count(i); ++o) {
                const std::size_t k = red.option(i, o).site;
                for (std::size_t q = 0; q < red.option_count(j); ++q) {
                    const std::size_t l = red.option(j, q).site;
                    if (!red.reachable(i, k, l)) {
                        for (int a = 0; a < 2; ++a) {
                            for (int b = 0; b < 2; ++b) {
                                pb.add_product(lit(i, o, a), lit(j, q, b), lambda[0]);
                            }
                        }
                        continue;
                    }
                    const Route* r = m_->routes_->find(i, k, l);
                    if (!r) {
                        throw ModelError("no route stored for a reachable site pair of part '" + inst.part(i).id + "'");
                    }
                    double base = 0.0;
                    for (int n = 0; n < 3; ++n) {
                        if (w.w[n] != 0.0) {
                            base += (w.w[n] / sc.d[n]) * r->contribution[n];
                        }
                    }
                    if (base == 0.0) {
                        continue;
                    }
                    for (int a = 0; a < 2; ++a) {
                        for (int b = 0; b < 2; ++b) {
                            pb.add_product(lit(i, o, a), lit(j, q, b), m_->share(i, a) * base);
                        }
                    }
                }
            }
        }

        // supplier target deviation
        if (w.w[3] != 0.0) {
            for (std::size_t u = 0; u < inst.supplier_count(); ++u) {
                std::vector<std::pair<Lit, double>> t;
                for (std::size_t i = 0; i < red.part_count(); ++i) {
                    for (std::size_t o = 0; o < red.option_count(i); ++o) {
                        if (red.option(i, o).supplier != u) {
                            continue;
                        }
                        for (int a = 0; a < 2; ++a) {
                            t.emplace_back(lit(i, o, a), inst.relative_value(i) * m_->share(i, a));
                        }
                    }
                }
                pb.add_square(t, -static_cast<double>(inst.supplier(u).ws_target), w.w[3] / sc.d[3]);
            }
        }

        for (std::size_t i = 0; i < red.part_count(); ++i) {
            if (m_->layout_.folded(i)) {
                continue;
            }
            // one option per source
            for (int a = 0; a < 2; ++a) {
                std::vector<std::pair<Lit, double>> t;
                for (std::size_t o = 0; o < red.option_count(i); ++o) {
                    t.emplace_back(lit(i, o, a), 1.0);
                }
                pb.add_square(t, -1.0, lambda[1]);
            }
            // distinct sites and regions for the two sources
            if (red.sites(i).size() >= 2) {
                for (std::size_t o = 0; o < red.option_count(i); ++o) {
                    for (std::size_t q = 0; q < red.option_count(i); ++q) {
                        if (red.option(i, o).site == red.option(i, q).site) {
                            pb.add_product(lit(i, o, 0), lit(i, q, 1), lambda[2]);
                        }
                    }
                }
            }
            if (red.regions(i).size() >= 2) {
                for (std::size_t o = 0; o < red.option_count(i); ++o) {
                    for (std::size_t q = 0; q < red.option_count(i); ++q) {
                        if (inst.site_region(red.option(i, o).site) == inst.site_region(red.option(i, q).site)) {
                            pb.add_product(lit(i, o, 0), lit(i, q, 1), lambda[3]);
                        }
                    }
                }
            }
        }

        // workshare windows
        const VariableLayout& lay = m_->layout_;
        auto load_terms = [&](bool site, std::size_t entity) {
            std::vector<std::pair<Lit, double>> t;
            for (std::size_t i = 0; i < red.part_count(); ++i) {
                for (std::size_t o = 0; o < red.option_count(i); ++o) {
                    const SiteSupplier& opt = red.option(i, o);
                    if ((site ? opt.site : opt.supplier) != entity) {
                        continue;
                    }
                    for (int a = 0; a < 2; ++a) {
                        t.emplace_back(lit(i, o, a), static_cast<double>(ra.workshare(i, a)));
                    }
                }
            }
            return t;
        };
        if (lambda[4] > 0.0) {
            for (std::size_t k = 0; k < inst.site_count(); ++k) {
                emit_window(pb, load_terms(true, k), m_->site_windows_[k], lay.ancilla_group(WindowFamily::SiteMin, k),
                            lay.ancilla_group(WindowFamily::SiteMax, k), lambda[4]);
            }
        }
        if (lambda[5] > 0.0) {
            for (std::size_t u = 0; u < inst.supplier_count(); ++u) {
                emit_window(pb, load_terms(false, u), m_->supplier_windows_[u],
                            lay.ancilla_group(WindowFamily::SupplierMin, u),
                            lay.ancilla_group(WindowFamily::SupplierMax, u), lambda[5]);
            }
        }
        m_->qubo_ = pb.finish();
    }

    std::shared_ptr<QuboModel> m_;
};

std::shared_ptr<const QuboModel> compile(std::shared_ptr<const ReducedInstance> reduced, const Weights& weights,
                                         const Multipliers& multipliers, const CompileOptions& options) {
    return ModelCompiler(std::move(reduced), weights, multipliers, options).run();
}

namespace {

int y_value(const QuboModel& m, const BitVector& x, std::size_t i, std::size_t o, int a) {
    std::size_t idx = m.layout().index(i, o, a);
    return idx == VariableLayout::npos ? 1 : x[idx];
}

std::int64_t ancilla_value(const BitVector& x, const AncillaGroup& g) {
    std::int64_t v = 0;
    for (int b = 0; b < g.bits; ++b) {
        if (x[g.first + static_cast<std::size_t>(b)]) {
            v += std::int64_t{1} << b;
        }
    }
    return v;
}

/// 2^{−n} (slack − z)^2 with z read from x, or the best representable z when the family has no ancillas.
double window_penalty(const BitVector& x, const AncillaGroup* g, std::int64_t slack, int bits) {
    std::int64_t z;
    if (g) {
        z = ancilla_value(x, *g);
    } else {
        z = std::clamp<std::int64_t>(slack, 0, (std::int64_t{1} << bits) - 1);
    }
    const double diff = static_cast<double>(slack - z);
    return std::ldexp(diff * diff, -bits);
}

}  // namespace

void workshare_loads(const QuboModel& model, const BitVector& x, std::vector<std::int64_t>& sites,
                     std::vector<std::int64_t>& suppliers) {
    const ReducedInstance& red = model.reduced();
    sites.assign(model.instance().site_count(), 0);
    suppliers.assign(model.instance().supplier_count(), 0);
    for (std::size_t i = 0; i < red.part_count(); ++i) {
        for (std::size_t o = 0; o < red.option_count(i); ++o) {
            const SiteSupplier& opt = red.option(i, o);
            for (int a = 0; a < 2; ++a) {
                if (y_value(model, x, i, o, a)) {
                    sites[opt.site] += model.rational().workshare(i, a);
                    suppliers[opt.supplier] += model.rational().workshare(i, a);
                }
            }
        }
    }
}

Evaluation evaluate(const QuboModel& model, const BitVector& x) {
    if (x.size() != model.size()) {
        throw ModelError("solution length " + std::to_string(x.size()) + " does not match model size " +
                         std::to_string(model.size()));
    }
    const ProblemInstance& inst = model.instance();
    const ReducedInstance& red = model.reduced();
    const KpiScales& sc = red.scales();
    Evaluation ev;

    // C1..C3 and P1 along parent links
    std::array<long double, 3> transport{};
    long double p1 = 0.0L;
    for (std::size_t i = 0; i < red.part_count(); ++i) {
        if (i == inst.root()) {
            continue;
        }
        const std::size_t j = inst.parent(i);
        for (std::size_t o = 0; o < red.option_count(i); ++o) {
            for (std::size_t q = 0; q < red.option_count(j); ++q) {
                const std::size_t k = red.option(i, o).site;
                const std::size_t l = red.option(j, q).site;
                for (int a = 0; a < 2; ++a) {
                    for (int b = 0; b < 2; ++b) {
                        if (!(y_value(model, x, i, o, a) && y_value(model, x, j, q, b))) {
                            continue;
                        }
                        if (!red.reachable(i, k, l)) {
                            p1 += 1.0L;
                            continue;
                        }
                        const Route* r = model.routes().find(i, k, l);
                        for (int n = 0; n < 3; ++n) {
                            transport[n] += model.share(i, a) * r->contribution[n];
                        }
                    }
                }
            }
        }
    }
    for (int n = 0; n < 3; ++n) {
        ev.kpi[n] = static_cast<double>(transport[n] / sc.d[n]);
    }

    // C4
    long double c4 = 0.0L;
    for (std::size_t u = 0; u < inst.supplier_count(); ++u) {
        long double share = 0.0L;
        for (std::size_t i = 0; i < red.part_count(); ++i) {
            for (std::size_t o = 0; o < red.option_count(i); ++o) {
                if (red.option(i, o).supplier != u) {
                    continue;
                }
                for (int a = 0; a < 2; ++a) {
                    if (y_value(model, x, i, o, a)) {
                        share += inst.relative_value(i) * model.share(i, a);
                    }
                }
            }
        }
        const long double dev = share - inst.supplier(u).ws_target;
        c4 += dev * dev;
    }
    ev.kpi[3] = static_cast<double>(c4 / sc.d[3]);

    // P2..P4
    long double p2 = 0.0L, p3 = 0.0L, p4 = 0.0L;
    for (std::size_t i = 0; i < red.part_count(); ++i) {
        for (int a = 0; a < 2; ++a) {
            long double count = 0.0L;
            for (std::size_t o = 0; o < red.option_count(i); ++o) {
                count += y_value(model, x, i, o, a);
            }
            p2 += (count - 1.0L) * (count - 1.0L);
        }
        if (red.sites(i).size() >= 2) {
            for (std::size_t k : red.sites(i)) {
                long double s0 = 0.0L, s1 = 0.0L;
                for (std::size_t o = 0; o < red.option_count(i); ++o) {
                    if (red.option(i, o).site == k) {
                        s0 += y_value(model, x, i, o, 0);
                        s1 += y_value(model, x, i, o, 1);
                    }
                }
                p3 += s0 * s1;
            }
        }
        if (red.regions(i).size() >= 2) {
            for (std::size_t reg : red.regions(i)) {
                long double s0 = 0.0L, s1 = 0.0L;
                for (std::size_t o = 0; o < red.option_count(i); ++o) {
                    if (inst.site_region(red.option(i, o).site) == reg) {
                        s0 += y_value(model, x, i, o, 0);
                        s1 += y_value(model, x, i, o, 1);
                    }
                }
                p4 += s0 * s1;
            }
        }
    }

    // P5, P6
    std::vector<std::int64_t> site_load, sup_load;
    workshare_loads(model, x, site_load, sup_load);
    const VariableLayout& lay = model.layout();
    double p5 = 0.0, p6 = 0.0;
    for (std::size_t k = 0; k < inst.site_count(); ++k) {
        const Window& w = model.site_window(k);
        p5 += window_penalty(x, lay.ancilla_group(WindowFamily::SiteMin, k), site_load[k] - w.lower, w.bits_min);
        p5 += window_penalty(x, lay.ancilla_group(WindowFamily::SiteMax, k), w.upper - site_load[k], w.bits_max);
    }
    for (std::size_t u = 0; u < inst.supplier_count(); ++u) {
        const Window& w = model.supplier_window(u);
        p6 += window_penalty(x, lay.ancilla_group(WindowFamily::SupplierMin, u), sup_load[u] - w.lower, w.bits_min);
        p6 += window_penalty(x, lay.ancilla_group(WindowFamily::SupplierMax, u), w.upper - sup_load[u], w.bits_max);
    }

    ev.penalty = {static_cast<double>(p1), static_cast<double>(p2), static_cast<double>(p3),
                  static_cast<double>(p4), p5, p6};
    long double total = 0.0L;
    for (int n = 0; n < 4; ++n) {
        ev.weighted_kpi[n] = model.weights().w[n] * ev.kpi[n];
        total += ev.weighted_kpi[n];
    }
    ev.feasible = true;
    for (int n = 0; n < 6; ++n) {
        if (model.multipliers().lambda[n] != 0.0) {
            total += model.multipliers().lambda[n] * ev.penalty[n];
        }
        if (ev.penalty[n] != 0.0) {
            ev.feasible = false;
        }
    }
    ev.analytic_objective = static_cast<double>(total);
    ev.objective = model.qubo().energy(x);
    return ev;
}

AncillaFill ancilla_fill(const QuboModel& model, const BitVector& x) {
    if (x.size() != model.size()) {
        throw ModelError("solution length does not match model size");
    }
    AncillaFill res;
    res.x = x;
    std::fill(res.x.begin() + static_cast<std::ptrdiff_t>(model.layout().assignment_count()), res.x.end(), 0);
    std::vector<std::int64_t> site_load, sup_load;
    workshare_loads(model, x, site_load, sup_load);
    const VariableLayout& lay = model.layout();
    auto place = [&](WindowFamily f, std::size_t entity, std::int64_t slack, int bits) {
        const AncillaGroup* g = lay.ancilla_group(f, entity);
        if (slack < 0 || slack > (std::int64_t{1} << bits) - 1) {
            res.failures.push_back(WindowFailure{f, entity, slack});
            return;
        }
        for (int b = 0; g && b < g->bits; ++b) {
            res.x[g->first + static_cast<std::size_t>(b)] = (slack >> b) & 1;
        }
    };
    for (std::size_t k = 0; k < model.instance().site_count(); ++k) {
        const Window& w = model.site_window(k);
        place(WindowFamily::SiteMin, k, site_load[k] - w.lower, w.bits_min);
        place(WindowFamily::SiteMax, k, w.upper - site_load[k], w.bits_max);
    }
    for (std::size_t u = 0; u < model.instance().supplier_count(); ++u) {
        const Window& w = model.supplier_window(u);
        place(WindowFamily::SupplierMin, u, sup_load[u] - w.lower, w.bits_min);
        place(WindowFamily::SupplierMax, u, w.upper - sup_load[u], w.bits_max);
    }
    res.ok = res.failures.empty();
    return res;
}

std::string model_coo(const QuboModel& model) {
    const Qubo& q = model.qubo();
    std::ostringstream out;
    std::size_t c = 0;
    const auto& quad = q.quadratic();
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q.linear()[i] != 0.0) {
            out << i << ' ' << i << ' ' << format_double(q.linear()[i]) << '\n';
        }
        while (c < quad.size() && quad[c].i == i) {
            out << quad[c].i << ' ' << quad[c].j << ' ' << format_double(quad[c].value) << '\n';
            ++c;
        }
    }
    return out.str();
}

std::string model_metadata_json(const QuboModel& model) {
    using nlohmann::ordered_json;
    const ProblemInstance& inst = model.instance();
    const VariableLayout& lay = model.layout();
    ordered_json j;
    j["n_x"] = lay.size();
    j["n_y"] = lay.assignment_count();
    j["n_z"] = lay.ancilla_count();
    j["offset"] = model.qubo().offset();
    j["weights"] = model.weights().w;
    j["lambda"] = model.multipliers().lambda;
    j["R"] = model.rational().R;
    j["R_bar"] = model.rational().R_bar;
    ordered_json parts = ordered_json::array();
    for (std::size_t i = 0; i < inst.part_count(); ++i) {
        parts.push_back({{"id", inst.part(i).id},
                         {"P", model.rational().P[i]},
                         {"P_bar", model.rational().P_bar[i]},
                         {"aliased", model.reduced().aliased(i)},
                         {"folded", lay.folded(i)}});
    }
    j["parts"] = std::move(parts);
    ordered_json vars = ordered_json::array();
    for (std::size_t v = 0; v < lay.assignment_count(); ++v) {
        const AssignmentVar& av = lay.vars()[v];
        const SiteSupplier& opt = model.reduced().option(av.part, av.option);
        vars.push_back({{"index", v},
                        {"part", inst.part(av.part).id},
                        {"site", inst.site(opt.site).id},
                        {"supplier", inst.supplier(opt.supplier).id},
                        {"source", av.source + 1}});
    }
    j["variables"] = std::move(vars);
    ordered_json anc = ordered_json::array();
    for (const AncillaGroup& g : lay.ancillas()) {
        const bool site = g.family == WindowFamily::SiteMin || g.family == WindowFamily::SiteMax;
        anc.push_back({{"family", family_name(g.family)},
                       {"entity", site ? inst.site(g.entity).id : inst.supplier(g.entity).id},
                       {"first", g.first},
                       {"bits", g.bits}});
    }
    j["ancillas"] = std::move(anc);
    return j.dump(2) + "\n";
}

void export_model(const QuboModel& model, const std::filesystem::path& coo_path,
                  const std::filesystem::path& json_path) {
    write_file(coo_path, model_coo(model));
    write_file(json_path, model_metadata_json(model));
}

}  // namespace chainopt
