#pragma once

#include "harnack/estimates.hpp"
#include "harnack/model.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace harnack {

/// Every problem found in a config, each prefixed with its line number.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

// Raw INI layer. Values keep their source text; typing happens in parse_config.

struct IniEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct IniSection {
    std::string name;
    int line = 0;
    std::vector<IniEntry> entries;
};

/// Sections in file order. Lines before the first header, malformed lines and
/// duplicate keys are errors.
std::vector<IniSection> parse_ini(std::string_view text);
/// Same, appending problems to `errors` instead of throwing; offending lines are skipped.
std::vector<IniSection> parse_ini(std::string_view text, std::vector<std::string>& errors);

struct ManifoldSpec {
    int dim = 1;
    std::array<double, 2> lengths{1.0, 1.0};
    std::array<int, 2> counts{64, 1};
    std::array<std::string, 2> length_sources{"1", "1"};  // as written, e.g. "2*pi"
};

struct InitialSpec {
    Expression w0;
    double floor = 1e-8;
};

struct SolverSpec {
    double t_end = 1.0;
    double safety = 0.5;
    int snapshot_count = 41;            // uniform over [0, t_end] when no explicit times
    std::vector<double> snapshot_times;  // explicit output times
    std::uint64_t seed = 1;
    std::optional<double> dt;  // fixed step; stable_dt when absent
    double steady_threshold = 1e-10;
    std::optional<Expression> reference;  // exact w(x, y, t) for error tables
    std::string refine = "grid";          // refinement axis: grid or time
};

struct CheckSpec {
    std::string name;
    std::string label;
    EstimateParams params;
};

struct Scenario {
    std::string name;
    ManifoldSpec manifold;
    WeightSpec weight;
    PotentialSpec potential;
    Nonlinearity nonlinearity = nl::Zero{};
    InitialSpec initial;
    SolverSpec solver;
    std::vector<CheckSpec> checks;
    Tolerances tolerances;

    Grid grid() const;
    /// Snapshot times actually requested (explicit list, or the uniform default).
    std::vector<double> output_times() const;
};

/// Parses and validates. Throws ConfigError listing every problem found.
Scenario parse_config_text(std::string_view text, const std::string& name = "scenario");
Scenario parse_config(const std::string& path);

/// Canonical JSON text of the parsed scenario (fixed key order, normalized expressions).
std::string normalized_scenario(const Scenario& s);
/// FNV-1a 64 of normalized_scenario, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

}  // namespace harnack
