#include "chainopt/pareto.hpp"

#include <algorithm>
#include <stdexcept>

#include "chainopt/util.hpp"

namespace chainopt {

namespace {

template <std::size_t D>
bool dominates_on(const Kpi4& p, const Kpi4& q, const std::array<int, D>& dims) {
    bool strict = false;
    for (int d : dims) {
        if (p[d] > q[d]) {
            return false;
        }
        strict = strict || p[d] < q[d];
    }
    return strict;
}

template <std::size_t D>
bool equal_on(const Kpi4& p, const Kpi4& q, const std::array<int, D>& dims) {
    return std::all_of(dims.begin(), dims.end(), [&](int d) { return p[d] == q[d]; });
}

template <std::size_t D>
std::vector<std::size_t> filter_on(const std::vector<Kpi4>& pts, const std::array<int, D>& dims, bool dedupe) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < pts.size() && keep; ++j) {
            if (j == i) {
                continue;
            }
            if (dominates_on(pts[j], pts[i], dims) || (dedupe && j < i && equal_on(pts[j], pts[i], dims))) {
                keep = false;
            }
        }
        if (keep) {
            out.push_back(i);
        }
    }
    return out;
}

/// Union volume over the first d components, by slicing along component d-1.
double hv_slices(std::vector<Kpi4> pts, const Kpi4& ref, int d) {
    if (pts.empty()) {
        return 0.0;
    }
    if (d == 2) {
        std::sort(pts.begin(), pts.end(), [](const Kpi4& a, const Kpi4& b) {
            return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
        });
        double area = 0.0, cur = ref[1];
        for (const Kpi4& p : pts) {
            if (p[1] < cur) {
                area += (ref[0] - p[0]) * (cur - p[1]);
                cur = p[1];
            }
        }
        return area;
    }
    const int axis = d - 1;
    std::sort(pts.begin(), pts.end(), [&](const Kpi4& a, const Kpi4& b) { return a[axis] < b[axis]; });
    double vol = 0.0;
    std::vector<Kpi4> active;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        active.push_back(pts[i]);
        const double next = i + 1 < pts.size() ? pts[i + 1][axis] : ref[axis];
        const double width = next - pts[i][axis];
        if (width > 0.0) {
            // drop points dominated in the lower dimensions before recursing
            std::vector<Kpi4> lower;
            if (d - 1 == 3) {
                const auto keep = filter_on(active, std::array<int, 3>{0, 1, 2}, true);
                for (std::size_t k : keep) lower.push_back(active[k]);
            } else {
                lower = active;
            }
            active = lower;
            vol += width * hv_slices(lower, ref, d - 1);
        }
    }
    return vol;
}

}  // namespace

std::vector<std::size_t> pareto_filter(const std::vector<Kpi4>& points) {
    return filter_on(points, std::array<int, 4>{0, 1, 2, 3}, true);
}

std::vector<std::size_t> projected_pareto(const std::vector<Kpi4>& points, int dim_a, int dim_b) {
    if (dim_a < 1 || dim_a > 4 || dim_b < 1 || dim_b > 4 || dim_a == dim_b) {
        throw std::invalid_argument("projection needs two distinct components in 1..4");
    }
    return filter_on(points, std::array<int, 2>{dim_a - 1, dim_b - 1}, false);
}

double hypervolume(const std::vector<Kpi4>& points, const Kpi4& reference, std::size_t* excluded) {
    std::vector<Kpi4> inside;
    std::size_t dropped = 0;
    for (const Kpi4& p : points) {
        bool ok = true;
        for (int d = 0; d < 4; ++d) {
            ok = ok && p[d] < reference[d];
        }
        if (ok) {
            inside.push_back(p);
        } else {
            ++dropped;
        }
    }
    if (excluded) {
        *excluded = dropped;
    }
    std::vector<Kpi4> front;
    for (std::size_t i : pareto_filter(inside)) {
        front.push_back(inside[i]);
    }
    return hv_slices(front, reference, 4);
}

std::vector<KpiPoint> read_kpi_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    auto col = [&](const std::string& name) {
        auto it = std::find(t.header.begin(), t.header.end(), name);
        return it == t.header.end() ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(it - t.header.begin());
    };
    std::array<std::size_t, 4> wc{}, cc{};
    for (int d = 0; d < 4; ++d) {
        wc[d] = col("w" + std::to_string(d + 1));
        const std::size_t lower = col("c" + std::to_string(d + 1));
        cc[d] = lower != static_cast<std::size_t>(-1) ? lower : col("C" + std::to_string(d + 1));
        if (wc[d] == static_cast<std::size_t>(-1) || cc[d] == static_cast<std::size_t>(-1)) {
            throw std::runtime_error(path.string() + ": missing w/c columns");
        }
    }
    std::size_t id_col = col("solution_id");
    if (id_col == static_cast<std::size_t>(-1)) {
        id_col = col("run_id");
    }
    const std::size_t feas_col = col("feasible");
    std::vector<KpiPoint> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        KpiPoint p;
        p.feasible = feas_col == static_cast<std::size_t>(-1) || row[feas_col] == "1" || row[feas_col] == "true";
        if (!p.feasible) {
            continue;
        }
        try {
            for (int d = 0; d < 4; ++d) {
                p.w[d] = std::stod(row[wc[d]]);
                p.c[d] = std::stod(row[cc[d]]);
            }
        } catch (const std::exception&) {
            throw std::runtime_error(path.string() + ": row " + std::to_string(r + 2) + " has a non-numeric value");
        }
        p.solution_id = id_col != static_cast<std::size_t>(-1) ? row[id_col] : std::to_string(r);
        out.push_back(std::move(p));
    }
    return out;
}

std::string kpi_csv(const std::vector<KpiPoint>& points) {
    std::string out = "w1,w2,w3,w4,c1,c2,c3,c4,solution_id,feasible\n";
    for (const KpiPoint& p : points) {
        for (double v : p.w) out += format_double(v) + ',';
        for (double v : p.c) out += format_double(v) + ',';
        out += csv_escape(p.solution_id) + ',' + (p.feasible ? "1" : "0") + '\n';
    }
    return out;
}

}  // namespace chainopt
