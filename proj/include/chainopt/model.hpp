#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainopt/preprocess.hpp"
#include "chainopt/qubo_core.hpp"
#include "chainopt/rational.hpp"

namespace chainopt {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Weights {
    std::array<double, 4> w{0.25, 0.25, 0.25, 0.25};

    void validate() const;
    std::array<double, 3> transport() const { return {w[0], w[1], w[2]}; }
};

struct Multipliers {
    std::array<double, 6> lambda{2.0, 2.0, 2.0, 2.0, 2.0, 2.0};

    /// λ1..λ4 must be positive; λ5 and λ6 may be zero, which drops the workshare penalties and their ancillas.
    void validate() const;
};

enum class WindowFamily { SiteMin = 0, SiteMax = 1, SupplierMin = 2, SupplierMax = 3 };

const char* family_name(WindowFamily f);

struct AssignmentVar {
    std::size_t part = 0;
    std::size_t option = 0;  // index into g_i
    int source = 0;          // 0 primary, 1 secondary; aliased parts only carry source 0
};

struct AncillaGroup {
    WindowFamily family = WindowFamily::SiteMin;
    std::size_t entity = 0;  // site or supplier index
    std::size_t first = 0;   // first variable index
    int bits = 0;
};

class VariableLayout {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t assignment_count() const { return vars_.size(); }
    std::size_t ancilla_count() const { return ancilla_total_; }
    std::size_t size() const { return vars_.size() + ancilla_total_; }

    const std::vector<AssignmentVar>& vars() const { return vars_; }
    const std::vector<AncillaGroup>& ancillas() const { return ancillas_; }

    /// Variable of y^a_{i,o}; npos when the part is folded into constants.
    std::size_t index(std::size_t part, std::size_t option, int source) const {
        return index_[part][option][source];
    }
    bool folded(std::size_t part) const { return folded_[part]; }

    /// One-hot groups: one per (part, source) with its own variables.
    const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
    /// Group of an assignment variable, npos for ancillas.
    std::size_t group_of(std::size_t var) const { return var < group_of_.size() ? group_of_[var] : npos; }
    /// Part and source of a group.
    std::pair<std::size_t, int> group_key(std::size_t group) const { return group_keys_[group]; }

    /// Ancilla group of a family and entity, or nullptr when the family carries no ancillas.
    const AncillaGroup* ancilla_group(WindowFamily family, std::size_t entity) const;

private:
    friend class ModelCompiler;

    std::vector<AssignmentVar> vars_;
    std::vector<AncillaGroup> ancillas_;
    std::size_t ancilla_total_ = 0;
    std::vector<std::vector<std::array<std::size_t, 2>>> index_;
    std::vector<bool> folded_;
    std::vector<std::vector<std::size_t>> groups_;
    std::vector<std::size_t> group_of_;
    std::vector<std::pair<std::size_t, int>> group_keys_;
    std::vector<std::array<std::size_t, 4>> ancilla_lookup_sites_;      // [site][family] -> ancillas_ index
    std::vector<std::array<std::size_t, 4>> ancilla_lookup_suppliers_;  // [supplier][family]
};

struct CompileOptions {
    int R = 10;
    int R_bar = 5;
    /// When set, every P̄_i takes this numerator instead of the rounded α_i.
    std::optional<std::int64_t> share_numerator;
    /// Eliminate parts with a single reduced option and fold them into constants.
    bool fold_forced = true;
};

/// A window on one site or supplier in integer units, plus the ancilla bit count reserved for it.
struct Window {
    std::int64_t lower = 0;   // K_min·R·R̄
    std::int64_t upper = 0;   // K_max·R·R̄
    int bits_min = 0;         // n^{(·,≥)}
    int bits_max = 0;         // n^{(·,≤)}
};

class QuboModel {
public:
    const ReducedInstance& reduced() const { return *reduced_; }
    std::shared_ptr<const ReducedInstance> reduced_ptr() const { return reduced_; }
    const ProblemInstance& instance() const { return reduced_->instance(); }
    const Weights& weights() const { return weights_; }
    const Multipliers& multipliers() const { return multipliers_; }
    const RationalApprox& rational() const { return rational_; }
    const VariableLayout& layout() const { return layout_; }
    const RouteTable& routes() const { return *routes_; }
    const Qubo& qubo() const { return qubo_; }
    const CompileOptions& options() const { return options_; }
    std::size_t size() const { return layout_.size(); }

    const Window& site_window(std::size_t k) const { return site_windows_[k]; }
    const Window& supplier_window(std::size_t u) const { return supplier_windows_[u]; }

    /// α^a_i as a real share.
    double share(std::size_t part, int source) const;

private:
    friend class ModelCompiler;

    std::shared_ptr<const ReducedInstance> reduced_;
    Weights weights_;
    Multipliers multipliers_;
    CompileOptions options_;
    RationalApprox rational_;
    VariableLayout layout_;
    std::shared_ptr<const RouteTable> routes_;
    Qubo qubo_;
    std::vector<Window> site_windows_;
    std::vector<Window> supplier_windows_;
};

std::shared_ptr<const QuboModel> compile(std::shared_ptr<const ReducedInstance> reduced, const Weights& weights,
                                         const Multipliers& multipliers, const CompileOptions& options = {});

/// Smallest n with 2^n ≥ value + 1; throws ModelError for negative values.
int ancilla_bits(std::int64_t value);

struct Evaluation {
    double objective = 0.0;           // matrix form
    double analytic_objective = 0.0;  // Σ C̄_n + Σ λ_n P_n evaluated term by term
    std::array<double, 4> kpi{};      // C_n, scaled by d_n only
    std::array<double, 4> weighted_kpi{};  // C̄_n = w_n C_n
    std::array<double, 6> penalty{};
    bool feasible = false;
};

/// Full evaluation of x. Families without ancillas report P5/P6 under their best ancilla completion.
Evaluation evaluate(const QuboModel& model, const BitVector& x);

struct WindowFailure {
    WindowFamily family = WindowFamily::SiteMin;
    std::size_t entity = 0;
    std::int64_t slack = 0;
};

struct AncillaFill {
    bool ok = false;
    BitVector x;  // input with ancillas overwritten; failing groups left at zero
    std::vector<WindowFailure> failures;
};

/// Chooses ancilla bits so every representable window slack is met exactly.
AncillaFill ancilla_fill(const QuboModel& model, const BitVector& x);

/// Workshare load per site and supplier implied by the assignment variables of x.
void workshare_loads(const QuboModel& model, const BitVector& x, std::vector<std::int64_t>& sites,
                     std::vector<std::int64_t>& suppliers);

/// Matrix export: COO text plus a JSON metadata sidecar.
std::string model_coo(const QuboModel& model);
std::string model_metadata_json(const QuboModel& model);
void export_model(const QuboModel& model, const std::filesystem::path& coo_path,
                  const std::filesystem::path& json_path);

}  // namespace chainopt
