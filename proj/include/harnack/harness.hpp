#pragma once

#include "harnack/config.hpp"
#include "harnack/estimates.hpp"
#include "harnack/solver.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace harnack {

inline constexpr int kSchemaVersion = 1;

/// A solved scenario: the model, its trajectory and per-snapshot derived fields.
struct Simulation {
    std::unique_ptr<Model> model;
    ScalarField w0;
    Trajectory trajectory;
    std::vector<SnapshotFields> fields;
};

/// Solve on `grid` with step `dt` (stable_dt from the scenario's safety when absent).
Simulation simulate(const Scenario& s, const Grid& grid, std::optional<double> dt = std::nullopt);
Simulation simulate(const Scenario& s);

/// Every configured check on a finished simulation.
std::vector<CheckReport> run_checks(const Scenario& s, const Simulation& sim);

struct AbortInfo {
    std::string message;
    Point location{0.0, 0.0};
    double time = 0.0;
    double value = 0.0;
};

/// Error of one quantity across refinement levels, with orders log2(e_k / e_{k+1}).
struct ConvergenceTable {
    std::string quantity;
    std::string axis;  // grid or time
    std::vector<double> h;
    std::vector<double> dt;
    std::vector<double> values;
    std::vector<std::optional<double>> orders;  // empty optional: n/a (roundoff level)
};

struct RunMetadata {
    RunStats stats;
    std::vector<double> snapshot_times;
    bool steady = false;
};

struct ReportBundle {
    int schema_version = kSchemaVersion;
    std::string scenario_name;
    std::string scenario_hash;
    std::string scenario;  // normalized JSON text
    RunMetadata run;
    std::vector<CheckReport> checks;
    std::vector<ConvergenceTable> convergence;
    std::optional<AbortInfo> abort;
    double wall_seconds = 0.0;  // emitted under "timing", excluded from comparisons
};

/// Solve and check. Solver aborts come back in `abort` with no checks.
ReportBundle run_scenario(const Scenario& s);

/// Largest node count a refinement study may reach.
inline constexpr std::size_t kRefinementNodeBudget = std::size_t{1} << 22;

/// Reruns at `levels` resolutions along the scenario's refine axis. Grid axis:
/// counts doubled per level, dt divided by 4 (fixed dt / h^2). Time axis: dt halved.
ReportBundle refinement_study(const Scenario& s, int levels);

/// log2(e_k / e_{k+1}); n/a when either error is at roundoff (< floor).
std::vector<std::optional<double>> empirical_orders(const std::vector<double>& errors, double floor = 1e-13);

std::string to_json(const ReportBundle& b, bool include_timing = true);
ReportBundle bundle_from_json(const std::string& text);
std::string to_csv(const ReportBundle& b);
std::string to_plotdata(const ReportBundle& b);

/// Writes `format` (json, csv or plotdata) to `path`.
void emit(const ReportBundle& b, const std::string& format, const std::string& path);

/// 0 when every verdict is pass or pass-with-flags, 1 on any fail, 2 on abort.
int exit_code(const ReportBundle& b);

}  // namespace harnack
