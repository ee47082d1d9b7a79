#include "chainopt/experiment.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "chainopt/assignment.hpp"
#include "chainopt/rational.hpp"
#include "json.hpp"

namespace chainopt {

using nlohmann::ordered_json;

namespace {

ordered_json qaoa_json(const QaoaParams& q) {
    return {{"p", q.p}, {"shots", q.shots}, {"max_qubits", q.max_qubits}};
}

QaoaParams qaoa_from(const ordered_json& j, QaoaParams q) {
    q.p = j.value("p", q.p);
    q.shots = j.value("shots", q.shots);
    q.max_qubits = j.value("max_qubits", q.max_qubits);
    return q;
}

ordered_json generator_json(const GeneratorParams& g) {
    return {{"n_parts", g.n_parts},
            {"n_sites", g.n_sites},
            {"n_suppliers", g.n_suppliers},
            {"n_warehouses", g.n_warehouses},
            {"n_regions", g.n_regions},
            {"edge_density", g.edge_density},
            {"alpha", g.alpha},
            {"seed", g.seed},
            {"max_depth", g.max_depth},
            {"sites_per_part", g.sites_per_part},
            {"suppliers_per_site", g.suppliers_per_site},
            {"single_site_fraction", g.single_site_fraction},
            {"ws_slack", g.ws_slack},
            {"value_denominator", g.value_denominator},
            {"share_denominator", g.share_denominator}};
}

GeneratorParams generator_from(const ordered_json& j) {
    GeneratorParams g;
    g.n_parts = j.value("n_parts", g.n_parts);
    g.n_sites = j.value("n_sites", g.n_sites);
    g.n_suppliers = j.value("n_suppliers", g.n_suppliers);
    g.n_warehouses = j.value("n_warehouses", g.n_warehouses);
    g.n_regions = j.value("n_regions", g.n_regions);
    g.edge_density = j.value("edge_density", g.edge_density);
    g.alpha = j.value("alpha", g.alpha);
    g.seed = j.value("seed", g.seed);
    g.max_depth = j.value("max_depth", g.max_depth);
    g.sites_per_part = j.value("sites_per_part", g.sites_per_part);
    g.suppliers_per_site = j.value("suppliers_per_site", g.suppliers_per_site);
    g.single_site_fraction = j.value("single_site_fraction", g.single_site_fraction);
    g.ws_slack = j.value("ws_slack", g.ws_slack);
    g.value_denominator = j.value("value_denominator", g.value_denominator);
    g.share_denominator = j.value("share_denominator", g.share_denominator);
    return g;
}

std::string solver_label(const ExperimentSpec& spec) {
    if (spec.solver == "iqts") {
        return std::string("iqts:") + sub_solver_name(spec.iqts.sub_solver);
    }
    std::string out = "hbs:";
    for (std::size_t k = 0; k < spec.hbs.solvers.size(); ++k) {
        out += (k ? "+" : "") + std::string(hbs_solver_name(spec.hbs.solvers[k]));
    }
    return out;
}

std::string id_for(const char* prefix, std::size_t i) {
    std::string digits = std::to_string(i);
    return prefix + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits;
}

}  // namespace

void ExperimentSpec::validate() const {
    if (instance_path.empty() == !generator.has_value()) {
        throw SpecError("give exactly one instance source: an instance path or generator parameters");
    }
    if (mode != "weight_grid" && mode != "weight_random" && mode != "alpha_sweep" && mode != "single") {
        throw SpecError("unknown mode '" + mode + "'");
    }
    if (solver != "iqts" && solver != "hbs") {
        throw SpecError("unknown solver '" + solver + "'");
    }
    if (grid_divisions < 1 || samples < 1) {
        throw SpecError("grid divisions and sample count must be positive");
    }
    if (!(0.5 <= alpha_min && alpha_min <= alpha_max && alpha_max <= 1.0)) {
        throw SpecError("alpha range must satisfy 0.5 <= min <= max <= 1");
    }
    if (R < 1 || R_bar < 1) {
        throw SpecError("R and R_bar must be positive");
    }
    try {
        weights.validate();
        multipliers.validate();
    } catch (const ModelError& e) {
        throw SpecError(e.what());
    }
    if (solver == "hbs" && (hbs.solvers.empty() || hbs.population < 1)) {
        throw SpecError("HBS needs at least one solver and a positive population");
    }
    if (solver == "iqts" && (iqts.m < 1 || iqts.n < 1 || iqts.kappa < 1)) {
        throw SpecError("IQTS needs m, n and kappa of at least 1");
    }
}

std::string spec_to_json(const ExperimentSpec& s) {
    ordered_json j;
    j["instance"] = s.instance_path.empty() ? ordered_json(nullptr) : ordered_json(s.instance_path);
    j["generator"] = s.generator ? generator_json(*s.generator) : ordered_json(nullptr);
    j["mode"] = s.mode;
    j["solver"] = s.solver;
    j["iqts"] = {{"m", s.iqts.m},
                 {"n", s.iqts.n},
                 {"kappa", s.iqts.kappa},
                 {"sub_solver", sub_solver_name(s.iqts.sub_solver)},
                 {"isf_budget", s.iqts.isf_budget},
                 {"isi_iterations", s.iqts.isi_iterations},
                 {"isi_stop_prob", s.iqts.isi_stop_prob},
                 {"literal_zero", s.iqts.literal_zero},
                 {"qaoa", qaoa_json(s.iqts.qaoa)},
                 {"sa", {{"steps", s.iqts.sa.steps},
                         {"beta_initial", s.iqts.sa.beta_initial},
                         {"beta_final", s.iqts.sa.beta_final}}}};
    ordered_json solvers = ordered_json::array();
    for (HbsSolver h : s.hbs.solvers) {
        solvers.push_back(hbs_solver_name(h));
    }
    j["hbs"] = {{"solvers", solvers},
                {"population", s.hbs.population},
                {"max_iterations", s.hbs.max_iterations},
                {"convergence_window", s.hbs.convergence_window},
                {"isf_budget", s.hbs.isf_budget},
                {"ibp_sweeps", s.hbs.ibp_sweeps},
                {"qaoa_qubits", s.hbs.qaoa_qubits},
                {"das", {{"samples", s.hbs.das.samples},
                         {"alpha_theta", s.hbs.das.alpha_theta},
                         {"alpha_L", s.hbs.das.alpha_L},
                         {"lambda", s.hbs.das.lambda},
                         {"eta_theta", s.hbs.das.eta_theta},
                         {"eta_L", s.hbs.das.eta_L}}},
                {"qaoa", qaoa_json(s.hbs.qaoa)}};
    j["grid_divisions"] = s.grid_divisions;
    j["samples"] = s.samples;
    j["alpha_min"] = s.alpha_min;
    j["alpha_max"] = s.alpha_max;
    j["weights"] = s.weights.w;
    j["lambda"] = s.multipliers.lambda;
    j["R"] = s.R;
    j["R_bar"] = s.R_bar;
    j["output_dir"] = s.output_dir;
    j["seed"] = s.seed;
    j["reference"] = s.reference;
    j["timing"] = s.timing;
    return j.dump(2) + "\n";
}

ExperimentSpec spec_from_json(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("experiment spec is not valid JSON: ") + e.what());
    }
    ExperimentSpec s;
    try {
        if (j.contains("instance") && !j["instance"].is_null()) {
            s.instance_path = j["instance"].get<std::string>();
        }
        if (j.contains("generator") && !j["generator"].is_null()) {
            s.generator = generator_from(j["generator"]);
        }
        s.mode = j.value("mode", s.mode);
        s.solver = j.value("solver", s.solver);
        if (j.contains("iqts")) {
            const auto& q = j["iqts"];
            s.iqts.m = q.value("m", s.iqts.m);
            s.iqts.n = q.value("n", s.iqts.n);
            s.iqts.kappa = q.value("kappa", s.iqts.kappa);
            s.iqts.sub_solver = parse_sub_solver(q.value("sub_solver", std::string(sub_solver_name(s.iqts.sub_solver))));
            s.iqts.isf_budget = q.value("isf_budget", s.iqts.isf_budget);
            s.iqts.isi_iterations = q.value("isi_iterations", s.iqts.isi_iterations);
            s.iqts.isi_stop_prob = q.value("isi_stop_prob", s.iqts.isi_stop_prob);
            s.iqts.literal_zero = q.value("literal_zero", s.iqts.literal_zero);
            if (q.contains("qaoa")) {
                s.iqts.qaoa = qaoa_from(q["qaoa"], s.iqts.qaoa);
            }
            if (q.contains("sa")) {
                s.iqts.sa.steps = q["sa"].value("steps", s.iqts.sa.steps);
                s.iqts.sa.beta_initial = q["sa"].value("beta_initial", s.iqts.sa.beta_initial);
                s.iqts.sa.beta_final = q["sa"].value("beta_final", s.iqts.sa.beta_final);
            }
        }
        if (j.contains("hbs")) {
            const auto& h = j["hbs"];
            if (h.contains("solvers")) {
                s.hbs.solvers.clear();
                for (const auto& name : h["solvers"]) {
                    s.hbs.solvers.push_back(parse_hbs_solver(name.get<std::string>()));
                }
            }
            s.hbs.population = h.value("population", s.hbs.population);
            s.hbs.max_iterations = h.value("max_iterations", s.hbs.max_iterations);
            s.hbs.convergence_window = h.value("convergence_window", s.hbs.convergence_window);
            s.hbs.isf_budget = h.value("isf_budget", s.hbs.isf_budget);
            s.hbs.ibp_sweeps = h.value("ibp_sweeps", s.hbs.ibp_sweeps);
            s.hbs.qaoa_qubits = h.value("qaoa_qubits", s.hbs.qaoa_qubits);
            if (h.contains("das")) {
                const auto& d = h["das"];
                s.hbs.das.samples = d.value("samples", s.hbs.das.samples);
                s.hbs.das.alpha_theta = d.value("alpha_theta", s.hbs.das.alpha_theta);
                s.hbs.das.alpha_L = d.value("alpha_L", s.hbs.das.alpha_L);
                s.hbs.das.lambda = d.value("lambda", s.hbs.das.lambda);
                s.hbs.das.eta_theta = d.value("eta_theta", s.hbs.das.eta_theta);
                s.hbs.das.eta_L = d.value("eta_L", s.hbs.das.eta_L);
            }
            if (h.contains("qaoa")) {
                s.hbs.qaoa = qaoa_from(h["qaoa"], s.hbs.qaoa);
            }
        }
        s.grid_divisions = j.value("grid_divisions", s.grid_divisions);
        s.samples = j.value("samples", s.samples);
        s.alpha_min = j.value("alpha_min", s.alpha_min);
        s.alpha_max = j.value("alpha_max", s.alpha_max);
        if (j.contains("weights")) {
            s.weights.w = j["weights"].get<std::array<double, 4>>();
        }
        if (j.contains("lambda")) {
            s.multipliers.lambda = j["lambda"].get<std::array<double, 6>>();
        }
        s.R = j.value("R", s.R);
        s.R_bar = j.value("R_bar", s.R_bar);
        s.output_dir = j.value("output_dir", s.output_dir);
        s.seed = j.value("seed", s.seed);
        if (j.contains("reference")) {
            s.reference = j["reference"].get<Kpi4>();
        }
        s.timing = j.value("timing", s.timing);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("bad experiment spec: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SpecError(e.what());
    }
    s.validate();
    return s;
}

std::vector<std::array<double, 4>> weight_grid(int d) {
    if (d < 1) {
        throw SpecError("grid divisions must be positive");
    }
    std::vector<std::array<double, 4>> out;
    for (int a = d; a >= 0; --a) {
        for (int b = d - a; b >= 0; --b) {
            for (int c = d - a - b; c >= 0; --c) {
                const int e = d - a - b - c;
                out.push_back({static_cast<double>(a) / d, static_cast<double>(b) / d, static_cast<double>(c) / d,
                               static_cast<double>(e) / d});
            }
        }
    }
    return out;
}

std::vector<ExperimentRow> plan_rows(const ExperimentSpec& spec) {
    std::vector<ExperimentRow> rows;
    if (spec.mode == "weight_grid") {
        const auto grid = weight_grid(spec.grid_divisions);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            rows.push_back({id_for("g", i), grid[i], std::nullopt, "model", derive_seed(spec.seed, i)});
        }
    } else if (spec.mode == "weight_random") {
        for (int i = 0; i < spec.samples; ++i) {
            // flat Dirichlet through normalized exponentials
            Rng rng(derive_seed(spec.seed, 1'000'000 + static_cast<std::uint64_t>(i)));
            std::array<double, 4> w{};
            double sum = 0.0;
            for (double& v : w) {
                v = -std::log(1.0 - uniform01(rng));
                sum += v;
            }
            for (double& v : w) {
                v /= sum;
            }
            rows.push_back({id_for("r", i), w, std::nullopt, "model", derive_seed(spec.seed, i)});
        }
    } else if (spec.mode == "alpha_sweep") {
        for (int i = 0; i < spec.samples; ++i) {
            Rng rng(derive_seed(spec.seed, 2'000'000 + static_cast<std::uint64_t>(i)));
            const double alpha = spec.alpha_min + (spec.alpha_max - spec.alpha_min) * uniform01(rng);
            const std::int64_t p_bar =
                std::clamp<std::int64_t>(nearest_numerator(alpha, spec.R_bar), (spec.R_bar + 1) / 2, spec.R_bar);
            rows.push_back({id_for("a", i), spec.weights.w, p_bar,
                            std::to_string(p_bar) + "/" + std::to_string(spec.R_bar), derive_seed(spec.seed, i)});
        }
    } else {
        rows.push_back({id_for("s", 0), spec.weights.w, std::nullopt, "model", derive_seed(spec.seed, 0)});
    }
    return rows;
}

std::string solution_report_json(const QuboModel& model, const Solution& s) {
    ordered_json j = ordered_json::parse(solution_json(model, s));
    std::vector<std::int64_t> sites, sups;
    workshare_loads(model, s.x, sites, sups);
    const double unit = static_cast<double>(model.rational().R) * model.rational().R_bar;
    const ProblemInstance& inst = model.instance();
    ordered_json site_rows = ordered_json::array(), sup_rows = ordered_json::array();
    for (std::size_t k = 0; k < inst.site_count(); ++k) {
        site_rows.push_back({{"id", inst.site(k).id},
                             {"value", static_cast<double>(sites[k]) / unit},
                             {"min", inst.site(k).ws_min},
                             {"max", inst.site(k).ws_max}});
    }
    for (std::size_t u = 0; u < inst.supplier_count(); ++u) {
        sup_rows.push_back({{"id", inst.supplier(u).id},
                            {"value", static_cast<double>(sups[u]) / unit},
                            {"min", inst.supplier(u).ws_min},
                            {"max", inst.supplier(u).ws_max},
                            {"target", inst.supplier(u).ws_target}});
    }
    j["workshare"] = {{"sites", site_rows}, {"suppliers", sup_rows}};
    return j.dump(2) + "\n";
}

std::string results_csv(const std::vector<RowResult>& rows, const ExperimentSpec& spec) {
    std::string out = "run_id,mode,w1,w2,w3,w4,alpha_spec,solver,seed,feasible,C1,C2,C3,C4,objective,wall_ms\n";
    const std::string label = solver_label(spec);
    for (const RowResult& r : rows) {
        out += r.row.run_id + ',' + spec.mode;
        for (double w : r.row.w) {
            out += ',' + format_double(w);
        }
        out += ',' + csv_escape(r.row.alpha_spec) + ',' + label + ',' + std::to_string(r.row.seed) + ',' +
               (r.feasible ? "1" : "0");
        for (double c : r.kpi) {
            out += ',' + (r.ok ? format_double(c) : std::string());
        }
        out += ',' + (r.ok ? format_double(r.objective) : std::string()) + ',' + format_double(r.wall_ms) + '\n';
    }
    return out;
}

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const std::filesystem::path out = spec.output_dir;
    auto instance = std::make_shared<const ProblemInstance>(spec.generator ? generate_synthetic(*spec.generator)
                                                                           : load_instance(spec.instance_path));
    const auto reduced = ReducedInstance::build(instance);
    save_instance(*instance, out / "instance.json");

    ExperimentSummary summary;
    const auto rows = plan_rows(spec);
    summary.rows.resize(rows.size());
    const std::size_t workers = thread_count();
    parallel_for(
        rows.size(),
        [&](std::size_t i) {
            RowResult& r = summary.rows[i];
            r.row = rows[i];
            const auto start = std::chrono::steady_clock::now();
            try {
                CompileOptions opts;
                opts.R = spec.R;
                opts.R_bar = spec.R_bar;
                opts.share_numerator = r.row.share_numerator;
                Weights w;
                w.w = r.row.w;
                auto row_reduced = reduced;
                if (r.row.share_numerator) {
                    // the sampled share replaces every part's primary share, in the KPIs as well
                    InstanceData data = instance->data();
                    for (Part& p : data.parts) {
                        p.alpha = static_cast<double>(*r.row.share_numerator) / spec.R_bar;
                    }
                    row_reduced = ReducedInstance::build(std::make_shared<const ProblemInstance>(std::move(data)));
                }
                const auto model = compile(row_reduced, w, spec.multipliers, opts);
                Solution sol;
                std::string trace;
                if (spec.solver == "iqts") {
                    IqtsConfig cfg = spec.iqts;
                    cfg.seed = r.row.seed;
                    IqtsResult res = iqts_solve(*model, cfg);
                    trace = iqts_trace_csv(res);
                    sol = std::move(res.best);
                } else {
                    HbsConfig cfg = spec.hbs;
                    cfg.seed = r.row.seed;
                    cfg.threads = workers > 1 ? 1 : 0;
                    HbsResult res = hbs_solve(*model, cfg);
                    trace = hbs_trace_csv(res, cfg);
                    sol = std::move(res.best);
                }
                r.ok = true;
                r.kpi = sol.eval.kpi;
                r.objective = sol.eval.objective;
                r.feasible = sol.eval.feasible && check_solution(*model, sol.x).feasible;
                write_file(out / "traces" / (r.row.run_id + ".csv"), trace);
                write_file(out / "solutions" / (r.row.run_id + ".json"), solution_report_json(*model, sol));
            } catch (const std::exception& e) {
                r.ok = false;
                r.feasible = false;
                r.error = e.what();
            }
            if (spec.timing) {
                r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            }
        },
        workers);

    std::vector<Kpi4> pts;
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < summary.rows.size(); ++i) {
        if (summary.rows[i].feasible) {
            pts.push_back(summary.rows[i].kpi);
            owner.push_back(i);
        }
    }
    std::vector<KpiPoint> front;
    for (std::size_t k : pareto_filter(pts)) {
        summary.pareto.push_back(owner[k]);
        const RowResult& r = summary.rows[owner[k]];
        front.push_back(KpiPoint{r.kpi, r.row.w, r.row.run_id, true});
    }
    summary.hypervolume = hypervolume(pts, spec.reference, &summary.excluded);
    if (summary.excluded > 0) {
        std::cerr << "warning: " << summary.excluded
                  << " feasible point(s) do not dominate the reference point and are left out of the hypervolume\n";
    }

    write_file(out / "results.csv", results_csv(summary.rows, spec));
    write_file(out / "pareto.csv", kpi_csv(front));
    ordered_json sj = {{"rows", summary.rows.size()},
                       {"feasible", pts.size()},
                       {"pareto", front.size()},
                       {"hypervolume", summary.hypervolume},
                       {"reference", spec.reference},
                       {"excluded", summary.excluded}};
    write_file(out / "summary.json", sj.dump(2) + "\n");

    ordered_json manifest;
    manifest["spec"] = ordered_json::parse(spec_to_json(spec));
    manifest["instance_file"] = "instance.json";
    ordered_json mrows = ordered_json::array();
    for (const RowResult& r : summary.rows) {
        ordered_json e = {{"run_id", r.row.run_id}, {"seed", r.row.seed}, {"w", r.row.w},
                          {"alpha_spec", r.row.alpha_spec}};
        if (r.ok) {
            e["trace"] = "traces/" + r.row.run_id + ".csv";
            e["solution"] = "solutions/" + r.row.run_id + ".json";
        } else {
            e["error"] = r.error;
        }
        mrows.push_back(std::move(e));
    }
    manifest["rows"] = std::move(mrows);
    manifest["outputs"] = {"results.csv", "pareto.csv", "summary.json"};
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
    return summary;
}

ExperimentSpec spec_from_manifest(const std::filesystem::path& manifest, const std::string& output_dir) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_file(manifest));
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(manifest.string() + ": " + e.what());
    }
    if (!j.contains("spec")) {
        throw SpecError(manifest.string() + ": no spec recorded");
    }
    ExperimentSpec s = spec_from_json(j["spec"].dump());
    if (!output_dir.empty()) {
        s.output_dir = output_dir;
    }
    return s;
}

}  // namespace chainopt
