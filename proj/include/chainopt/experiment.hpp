#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chainopt/generator.hpp"
#include "chainopt/metasolvers.hpp"
#include "chainopt/model.hpp"
#include "chainopt/pareto.hpp"

namespace chainopt {

class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
    std::string instance_path;                 // either this ...
    std::optional<GeneratorParams> generator;  // ... or this
    std::string mode = "weight_grid";          // weight_grid | weight_random | alpha_sweep | single
    std::string solver = "iqts";               // iqts | hbs
    IqtsConfig iqts;
    HbsConfig hbs;
    int grid_divisions = 10;   // grid step 1/divisions
    int samples = 10;          // rows for weight_random and alpha_sweep
    double alpha_min = 0.5;
    double alpha_max = 0.8;
    Weights weights;           // single and alpha_sweep rows
    Multipliers multipliers;
    int R = 10;
    int R_bar = 5;
    std::string output_dir = "results";
    std::uint64_t seed = 42;
    Kpi4 reference = kDefaultReference;
    bool timing = false;       // fill wall_ms (results are then no longer byte-reproducible)

    void validate() const;
};

std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(std::string_view text);

/// All w with Σw = 1 on the grid {0, 1/d, ..., 1}, built from integer compositions of d.
std::vector<std::array<double, 4>> weight_grid(int divisions);

struct ExperimentRow {
    std::string run_id;
    std::array<double, 4> w{};
    std::optional<std::int64_t> share_numerator;  // alpha_sweep rows fix P̄ for every part
    std::string alpha_spec;
    std::uint64_t seed = 0;
};

std::vector<ExperimentRow> plan_rows(const ExperimentSpec& spec);

struct RowResult {
    ExperimentRow row;
    bool ok = false;        // solver returned a solution
    bool feasible = false;  // independent checker agrees
    Kpi4 kpi{};
    double objective = 0.0;
    double wall_ms = 0.0;
    std::string error;
};

struct ExperimentSummary {
    std::vector<RowResult> rows;
    std::vector<std::size_t> pareto;  // indices into rows
    double hypervolume = 0.0;
    std::size_t excluded = 0;         // feasible points outside the reference box
};

/// Runs every row and writes results.csv, pareto.csv, summary.json, manifest.json,
/// traces/ and solutions/ under spec.output_dir.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

/// Loads the spec echoed in a manifest; `output_dir` overrides the recorded directory when non-empty.
ExperimentSpec spec_from_manifest(const std::filesystem::path& manifest, const std::string& output_dir = "");

/// Solution JSON with a per-site and per-supplier workshare block for plotting.
std::string solution_report_json(const QuboModel& model, const Solution& s);

std::string results_csv(const std::vector<RowResult>& rows, const ExperimentSpec& spec);

}  // namespace chainopt
