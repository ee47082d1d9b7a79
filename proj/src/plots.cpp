#include "chainopt/plots.hpp"

#include <algorithm>
#include <cstdio>

#include "chainopt/util.hpp"
#include "json.hpp"

namespace chainopt {

namespace {

constexpr double kWidth = 420, kHeight = 400, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string header(double w, double h, const std::string& title) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           fixed(w, 0) + "\" height=\"" + fixed(h, 0) + "\" viewBox=\"0 0 " + fixed(w, 0) + " " + fixed(h, 0) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<text x=\"" + fixed(w / 2, 1) +
           "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + escape(title) +
           "</text>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 11) {
    return "<text x=\"" + fixed(x, 1) + "\" y=\"" + fixed(y, 1) + "\" text-anchor=\"" + anchor +
           "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) + "\">" + escape(s) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const char* stroke, double width = 1.0,
                 const char* dash = nullptr) {
    std::string s = "<line x1=\"" + fixed(x1, 1) + "\" y1=\"" + fixed(y1, 1) + "\" x2=\"" + fixed(x2, 1) + "\" y2=\"" +
                    fixed(y2, 1) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + fixed(width, 1) + "\"";
    if (dash) {
        s += std::string(" stroke-dasharray=\"") + dash + "\"";
    }
    return s + "/>\n";
}

struct Range {
    double lo, hi;
};

Range padded(double lo, double hi) {
    if (hi - lo < 1e-12) {
        const double pad = std::max(0.5, std::abs(lo) * 0.1);
        return {lo - pad, hi + pad};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

}  // namespace

std::string kpi_scatter_svg(const std::vector<Kpi4>& points, int a, int b) {
    const std::string ca = "C" + std::to_string(a), cb = "C" + std::to_string(b);
    std::string svg = header(kWidth, kHeight, ca + " vs " + cb);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    svg += line(x0, y0, x1, y0, "black") + line(x0, y0, x0, y1, "black");
    svg += text((x0 + x1) / 2, kHeight - 12, ca) + text(18, (y0 + y1) / 2, cb);
    if (points.empty()) {
        svg += text((x0 + x1) / 2, (y0 + y1) / 2, "no feasible results");
        return svg + "</svg>\n";
    }
    double xmin = points[0][a - 1], xmax = xmin, ymin = points[0][b - 1], ymax = ymin;
    for (const Kpi4& p : points) {
        xmin = std::min(xmin, p[a - 1]);
        xmax = std::max(xmax, p[a - 1]);
        ymin = std::min(ymin, p[b - 1]);
        ymax = std::max(ymax, p[b - 1]);
    }
    const Range rx = padded(xmin, xmax), ry = padded(ymin, ymax);
    auto px = [&](double v) { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * (x1 - x0); };
    auto py = [&](double v) { return y0 - (v - ry.lo) / (ry.hi - ry.lo) * (y0 - y1); };
    for (int t = 0; t <= 4; ++t) {
        const double vx = rx.lo + (rx.hi - rx.lo) * t / 4, vy = ry.lo + (ry.hi - ry.lo) * t / 4;
        svg += line(px(vx), y0, px(vx), y0 + 4, "black") + text(px(vx), y0 + 16, fixed(vx), "middle", 9);
        svg += line(x0 - 4, py(vy), x0, py(vy), "black") + text(x0 - 6, py(vy) + 3, fixed(vy), "end", 9);
    }
    std::vector<bool> overall(points.size(), false), projected(points.size(), false);
    for (std::size_t i : pareto_filter(points)) overall[i] = true;
    for (std::size_t i : projected_pareto(points, a, b)) projected[i] = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = px(points[i][a - 1]), y = py(points[i][b - 1]);
        if (overall[i]) {
            svg += "<circle class=\"pareto\" cx=\"" + fixed(x, 1) + "\" cy=\"" + fixed(y, 1) +
                   "\" r=\"4\" fill=\"#1f4e9c\" stroke=\"#1f4e9c\"/>\n";
        } else if (projected[i]) {
            svg += "<rect class=\"projected\" x=\"" + fixed(x - 4, 1) + "\" y=\"" + fixed(y - 4, 1) +
                   "\" width=\"8\" height=\"8\" fill=\"#e07b00\"/>\n";
        } else {
            svg += "<circle class=\"dominated\" cx=\"" + fixed(x, 1) + "\" cy=\"" + fixed(y, 1) +
                   "\" r=\"3.5\" fill=\"none\" stroke=\"#888888\"/>\n";
        }
    }
    return svg + "</svg>\n";
}

std::string workshare_svg(const std::string& solution_json, const std::string& title) {
    const auto j = nlohmann::json::parse(solution_json);
    struct Bar {
        std::string id;
        double value, lo, hi;
        double target;  // negative when absent
    };
    std::vector<Bar> bars;
    const auto& ws = j.at("workshare");
    for (const auto& s : ws.at("sites")) {
        bars.push_back({s.at("id"), s.at("value"), s.at("min"), s.at("max"), -1.0});
    }
    const std::size_t site_count = bars.size();
    for (const auto& s : ws.at("suppliers")) {
        bars.push_back({s.at("id"), s.at("value"), s.at("min"), s.at("max"), s.at("target")});
    }
    const double slot = 36.0;
    const double width = kLeft + kRight + slot * std::max<std::size_t>(bars.size(), 1) + (site_count ? slot / 2 : 0);
    std::string svg = header(width, kHeight, title);
    const double y0 = kHeight - kBottom, y1 = kTop;
    auto py = [&](double v) { return y0 - std::clamp(v, 0.0, 100.0) / 100.0 * (y0 - y1); };
    svg += line(kLeft, y0, width - kRight, y0, "black") + line(kLeft, y0, kLeft, y1, "black");
    for (int t = 0; t <= 100; t += 25) {
        svg += line(kLeft - 4, py(t), kLeft, py(t), "black") + text(kLeft - 6, py(t) + 3, std::to_string(t), "end", 9);
    }
    svg += text(18, (y0 + y1) / 2, "%");
    double x = kLeft + 8;
    for (std::size_t k = 0; k < bars.size(); ++k) {
        if (k == site_count && site_count) {
            x += slot / 2;
        }
        const Bar& b = bars[k];
        const char* fill = k < site_count ? "#6a9fd8" : "#8cc084";
        svg += "<rect x=\"" + fixed(x, 1) + "\" y=\"" + fixed(py(b.value), 1) + "\" width=\"20\" height=\"" +
               fixed(y0 - py(b.value), 1) + "\" fill=\"" + fill + "\"/>\n";
        svg += line(x - 3, py(b.lo), x + 23, py(b.lo), "#c0392b", 2.0);
        svg += line(x - 3, py(b.hi), x + 23, py(b.hi), "#c0392b", 2.0);
        if (b.target >= 0.0) {
            svg += line(x - 3, py(b.target), x + 23, py(b.target), "#1f4e9c", 2.0, "4,2");
        }
        svg += text(x + 10, y0 + 14, b.id, "middle", 9);
        x += slot;
    }
    return svg + "</svg>\n";
}

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& results,
                                              const std::filesystem::path& out_dir) {
    const std::filesystem::path csv = std::filesystem::is_directory(results) ? results / "results.csv" : results;
    std::vector<KpiPoint> rows = read_kpi_csv(csv);
    std::vector<Kpi4> pts;
    for (const KpiPoint& p : rows) {
        pts.push_back(p.c);
    }
    std::vector<std::filesystem::path> written;
    for (int a = 1; a <= 4; ++a) {
        for (int b = a + 1; b <= 4; ++b) {
            const auto path = out_dir / ("kpi_c" + std::to_string(a) + "_c" + std::to_string(b) + ".svg");
            write_file(path, kpi_scatter_svg(pts, a, b));
            written.push_back(path);
        }
    }
    const std::filesystem::path solutions = csv.parent_path() / "solutions";
    for (const KpiPoint& p : rows) {
        const auto file = solutions / (p.solution_id + ".json");
        if (!std::filesystem::exists(file)) {
            continue;
        }
        const auto path = out_dir / ("workshare_" + p.solution_id + ".svg");
        write_file(path, workshare_svg(read_file(file), "workshare " + p.solution_id));
        written.push_back(path);
    }
    return written;
}

}  // namespace chainopt
