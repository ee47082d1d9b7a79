#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chainopt/assignment.hpp"
#include "chainopt/experiment.hpp"
#include "chainopt/generator.hpp"
#include "chainopt/metasolvers.hpp"
#include "chainopt/model.hpp"
#include "chainopt/pareto.hpp"
#include "chainopt/plots.hpp"
#include "chainopt/preprocess.hpp"

using namespace chainopt;

namespace {

struct ModelFlags {
    std::vector<double> weights{0.25, 0.25, 0.25, 0.25};
    std::vector<double> lambda{2, 2, 2, 2, 2, 2};
    int R = 10;
    int R_bar = 5;
    bool no_fold = false;

    void add(CLI::App* app) {
        app->add_option("--weights", weights, "w1,w2,w3,w4 (sum 1)")->delimiter(',')->expected(4);
        app->add_option("--lambda", lambda, "six penalty multipliers")->delimiter(',')->expected(6);
        app->add_option("--R", R, "value denominator");
        app->add_option("--R-bar", R_bar, "source share denominator");
        app->add_flag("--no-fold", no_fold, "keep single-option parts as variables");
    }

    std::shared_ptr<const QuboModel> build(const std::string& path) const {
        auto inst = std::make_shared<const ProblemInstance>(load_instance(path));
        Weights w;
        std::copy(weights.begin(), weights.end(), w.w.begin());
        Multipliers m;
        std::copy(lambda.begin(), lambda.end(), m.lambda.begin());
        CompileOptions o;
        o.R = R;
        o.R_bar = R_bar;
        o.fold_forced = !no_fold;
        return compile(ReducedInstance::build(inst), w, m, o);
    }
};

void add_generator_flags(CLI::App* app, GeneratorParams& g) {
    app->add_option("--parts", g.n_parts);
    app->add_option("--sites", g.n_sites);
    app->add_option("--suppliers", g.n_suppliers);
    app->add_option("--warehouses", g.n_warehouses);
    app->add_option("--regions", g.n_regions);
    app->add_option("--density", g.edge_density, "transport edge density in [0, 1]");
    app->add_option("--alpha", g.alpha, "primary source share");
    app->add_option("--max-depth", g.max_depth);
    app->add_option("--sites-per-part", g.sites_per_part);
    app->add_option("--suppliers-per-site", g.suppliers_per_site);
    app->add_option("--single-site-fraction", g.single_site_fraction);
    app->add_option("--ws-slack", g.ws_slack, "percent of slack around the planted workshare");
}

void add_iqts_flags(CLI::App* app, IqtsConfig& c, std::string& sub) {
    app->add_option("--m", c.m, "parts per subtree");
    app->add_option("--n", c.n, "variables per sub-problem");
    app->add_option("--kappa", c.kappa, "repetitions");
    app->add_option("--sub-solver", sub, "qaoa | sa | brute_force");
    app->add_option("--qaoa-p", c.qaoa.p, "QAOA depth");
    app->add_option("--sa-steps", c.sa.steps);
    app->add_flag("--literal-zero", c.literal_zero, "clamp unselected variables to zero");
}

void add_hbs_flags(CLI::App* app, HbsConfig& c, std::vector<std::string>& solvers) {
    app->add_option("--hbs-solvers", solvers, "cacm,ibp,qaoa")->delimiter(',');
    app->add_option("--population", c.population);
    app->add_option("--iterations", c.max_iterations);
    app->add_option("--window", c.convergence_window, "iterations without improvement before stopping");
}

void apply_solver_names(IqtsConfig& iq, const std::string& sub, HbsConfig& hb, const std::vector<std::string>& names) {
    iq.sub_solver = parse_sub_solver(sub);
    if (!names.empty()) {
        hb.solvers.clear();
        for (const auto& n : names) {
            hb.solvers.push_back(parse_hbs_solver(n));
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid supply chain assignment optimizer"};
    app.require_subcommand(1);

    GeneratorParams gen;
    std::string gen_out;
    auto* generate = app.add_subcommand("generate", "write a synthetic instance");
    add_generator_flags(generate, gen);
    generate->add_option("--seed", gen.seed);
    generate->add_option("-o,--out", gen_out, "instance JSON path")->required();

    ModelFlags compile_flags;
    std::string compile_in, compile_prefix;
    auto* compile_cmd = app.add_subcommand("compile", "export the QUBO matrix, metadata and route table");
    compile_cmd->add_option("instance", compile_in)->required();
    compile_flags.add(compile_cmd);
    compile_cmd->add_option("-o,--out", compile_prefix, "output prefix")->required();

    ModelFlags solve_flags;
    std::string solve_in, solve_out, solve_trace, solve_solver = "iqts", solve_sub = "qaoa";
    std::vector<std::string> solve_hbs;
    std::uint64_t solve_seed = 42;
    IqtsConfig solve_iqts;
    HbsConfig solve_hbs_cfg;
    solve_hbs_cfg.threads = 0;
    auto* solve = app.add_subcommand("solve", "solve one instance for one weight vector");
    solve->add_option("instance", solve_in)->required();
    solve_flags.add(solve);
    solve->add_option("--solver", solve_solver, "iqts | hbs | isg");
    solve->add_option("--seed", solve_seed);
    add_iqts_flags(solve, solve_iqts, solve_sub);
    add_hbs_flags(solve, solve_hbs_cfg, solve_hbs);
    solve->add_option("-o,--out", solve_out, "solution JSON (default: stdout)");
    solve->add_option("--trace", solve_trace, "per-step trace CSV");

    std::string sweep_config, sweep_manifest, sweep_instance, sweep_out, sweep_sub = "qaoa";
    std::vector<std::string> sweep_hbs;
    std::vector<double> sweep_reference;
    double grid_resolution = 0.0;
    GeneratorParams sweep_gen;
    ExperimentSpec spec;
    auto* sweep = app.add_subcommand("sweep", "run a weight or source-share sweep");
    sweep->add_option("--config", sweep_config, "experiment spec JSON");
    sweep->add_option("--manifest", sweep_manifest, "re-run the spec recorded in a manifest");
    sweep->add_option("--instance", sweep_instance, "instance JSON (otherwise a synthetic one is generated)");
    add_generator_flags(sweep, sweep_gen);
    sweep->add_option("--instance-seed", sweep_gen.seed, "generator seed");
    sweep->add_option("--mode", spec.mode, "weight_grid | weight_random | alpha_sweep | single");
    sweep->add_option("--solver", spec.solver, "iqts | hbs");
    sweep->add_option("--grid-resolution", grid_resolution, "grid step, e.g. 0.1");
    sweep->add_option("--samples", spec.samples, "rows for weight_random and alpha_sweep");
    sweep->add_option("--seed", spec.seed, "master seed");
    sweep->add_option("--R", spec.R);
    sweep->add_option("--R-bar", spec.R_bar);
    sweep->add_option("--reference", sweep_reference, "hypervolume reference point")->delimiter(',')->expected(4);
    sweep->add_flag("--timing", spec.timing, "record wall time per row");
    add_iqts_flags(sweep, spec.iqts, sweep_sub);
    add_hbs_flags(sweep, spec.hbs, sweep_hbs);
    sweep->add_option("-o,--out", sweep_out, "output directory");

    std::string pareto_in, pareto_out;
    std::vector<double> pareto_reference(kDefaultReference.begin(), kDefaultReference.end());
    auto* pareto = app.add_subcommand("pareto", "filter a KPI table and compute its hypervolume");
    pareto->add_option("csv", pareto_in, "results.csv or a w1..w4,c1..c4 table")->required();
    pareto->add_option("--reference", pareto_reference)->delimiter(',')->expected(4);
    pareto->add_option("-o,--out", pareto_out, "write the non-dominated rows here");

    std::string plot_in, plot_out;
    auto* plot = app.add_subcommand("plot", "render SVG plots of a sweep");
    plot->add_option("results", plot_in, "results.csv or its directory")->required();
    plot->add_option("-o,--out", plot_out, "output directory (default: <results dir>/plots)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) {
            save_instance(generate_synthetic(gen), gen_out);
            std::cout << "wrote " << gen_out << "\n";
        } else if (*compile_cmd) {
            const auto model = compile_flags.build(compile_in);
            export_model(*model, compile_prefix + ".coo", compile_prefix + ".json");
            write_file(compile_prefix + ".routes.csv", model->routes().to_csv(model->instance()));
            std::cout << "variables " << model->size() << " (assignment " << model->layout().assignment_count()
                      << ", ancilla " << model->layout().ancilla_count() << ")\n";
        } else if (*solve) {
            apply_solver_names(solve_iqts, solve_sub, solve_hbs_cfg, solve_hbs);
            const auto model = solve_flags.build(solve_in);
            Solution sol;
            std::string trace;
            if (solve_solver == "iqts") {
                solve_iqts.seed = solve_seed;
                IqtsResult r = iqts_solve(*model, solve_iqts);
                trace = iqts_trace_csv(r);
                sol = std::move(r.best);
            } else if (solve_solver == "hbs") {
                solve_hbs_cfg.seed = solve_seed;
                HbsResult r = hbs_solve(*model, solve_hbs_cfg);
                trace = hbs_trace_csv(r, solve_hbs_cfg);
                sol = std::move(r.best);
            } else if (solve_solver == "isg") {
                Rng rng(solve_seed);
                sol = isg(*model, rng);
            } else {
                throw std::invalid_argument("unknown solver '" + solve_solver + "'");
            }
            const std::string json = solution_report_json(*model, sol);
            if (solve_out.empty()) {
                std::cout << json;
            } else {
                write_file(solve_out, json);
            }
            if (!solve_trace.empty()) {
                write_file(solve_trace, trace);
            }
        } else if (*sweep) {
            if (!sweep_manifest.empty()) {
                spec = spec_from_manifest(sweep_manifest, sweep_out);
            } else if (!sweep_config.empty()) {
                spec = spec_from_json(read_file(sweep_config));
                if (!sweep_out.empty()) {
                    spec.output_dir = sweep_out;
                }
            } else {
                apply_solver_names(spec.iqts, sweep_sub, spec.hbs, sweep_hbs);
                if (sweep_instance.empty()) {
                    spec.generator = sweep_gen;
                } else {
                    spec.instance_path = sweep_instance;
                }
                if (grid_resolution > 0.0) {
                    spec.grid_divisions = static_cast<int>(std::lround(1.0 / grid_resolution));
                    if (std::abs(spec.grid_divisions * grid_resolution - 1.0) > 1e-9) {
                        throw SpecError("grid resolution must divide 1");
                    }
                }
                if (!sweep_reference.empty()) {
                    std::copy(sweep_reference.begin(), sweep_reference.end(), spec.reference.begin());
                }
                if (!sweep_out.empty()) {
                    spec.output_dir = sweep_out;
                }
            }
            const ExperimentSummary s = run_experiment(spec);
            std::size_t feasible = 0;
            for (const auto& r : s.rows) {
                feasible += r.feasible ? 1 : 0;
            }
            std::cout << "rows " << s.rows.size() << ", feasible " << feasible << ", pareto " << s.pareto.size()
                      << ", hypervolume " << format_double(s.hypervolume) << "\n";
        } else if (*pareto) {
            const auto rows = read_kpi_csv(pareto_in);
            std::vector<Kpi4> pts;
            for (const auto& r : rows) {
                pts.push_back(r.c);
            }
            Kpi4 ref{};
            std::copy(pareto_reference.begin(), pareto_reference.end(), ref.begin());
            std::size_t excluded = 0;
            const double hv = hypervolume(pts, ref, &excluded);
            std::vector<KpiPoint> front;
            for (std::size_t i : pareto_filter(pts)) {
                front.push_back(rows[i]);
            }
            if (excluded) {
                std::cerr << "warning: " << excluded << " point(s) outside the reference box\n";
            }
            if (!pareto_out.empty()) {
                write_file(pareto_out, kpi_csv(front));
            }
            std::cout << "points " << pts.size() << ", pareto " << front.size() << ", hypervolume "
                      << format_double(hv) << "\n";
        } else if (*plot) {
            std::filesystem::path in = plot_in;
            std::filesystem::path out = plot_out.empty()
                                            ? (std::filesystem::is_directory(in) ? in : in.parent_path()) / "plots"
                                            : std::filesystem::path(plot_out);
            const auto files = emit_plots(in, out);
            std::cout << "wrote " << files.size() << " SVG files to " << out.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
