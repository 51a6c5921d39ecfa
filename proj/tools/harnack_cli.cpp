#include "harnack/config.hpp"
#include "harnack/harness.hpp"
#include "harnack/nonlinearity.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace harnack;

namespace {

std::string extension(const std::string& format) { return format == "plotdata" ? "dat" : format; }

void summarize(const ReportBundle& b) {
    if (b.abort) {
        std::cerr << "abort: " << b.abort->message << "\n";
        return;
    }
    std::cerr << "dt = " << b.run.stats.dt << ", steps = " << b.run.stats.steps << ", min w = " << b.run.stats.min_w
              << "\n";
    for (const CheckReport& r : b.checks) {
        std::cerr << r.name << (r.label.empty() ? "" : "." + r.label) << ": " << to_string(r.verdict)
                  << " (min margin " << r.min_margin << ", tolerance " << r.tolerance << ")\n";
        for (const Flag& f : r.flags) {
            if (!f.holds) std::cerr << "  flag: " << f.name << " does not hold; " << f.witness << "\n";
        }
    }
    for (const ConvergenceTable& t : b.convergence) {
        std::cerr << t.quantity << " [" << t.axis << "]:";
        for (double v : t.values) std::cerr << " " << v;
        std::cerr << " | orders:";
        for (const auto& o : t.orders) {
            if (o) {
                std::cerr << " " << *o;
            } else {
                std::cerr << " n/a";
            }
        }
        std::cerr << "\n";
    }
}

int output(const ReportBundle& b, const std::string& out_dir, const std::string& format) {
    summarize(b);
    if (out_dir.empty()) {
        if (format == "json") {
            std::cout << to_json(b);
        } else if (format == "csv") {
            std::cout << to_csv(b);
        } else {
            std::cout << to_plotdata(b);
        }
    } else {
        std::filesystem::create_directories(out_dir);
        const std::string path = (std::filesystem::path(out_dir) / (b.scenario_name + "." + extension(format))).string();
        emit(b, format, path);
        std::cerr << "wrote " << path << "\n";
    }
    return exit_code(b);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Harnack: solver and estimate checker for (L_f - q - d/dt) w = G(w) on flat tori"};
    app.require_subcommand(1);

    std::string config, out_dir, format = "json";
    int levels = 2;

    auto* run = app.add_subcommand("run", "solve a scenario and run its checks");
    run->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory (stdout when absent)");
    run->add_option("--format", format, "json, csv or plotdata")
        ->check(CLI::IsMember({"json", "csv", "plotdata"}));

    auto* refine = app.add_subcommand("refine", "refinement study along the scenario's refine axis");
    refine->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);
    refine->add_option("--levels", levels, "number of levels (>= 2)")->required();
    refine->add_option("--out", out_dir, "output directory (stdout when absent)");
    refine->add_option("--format", format, "json, csv or plotdata")
        ->check(CLI::IsMember({"json", "csv", "plotdata"}));

    auto* list = app.add_subcommand("list-cases", "print the nonlinearity catalog");

    auto* validate_cmd = app.add_subcommand("validate", "parse and validate a scenario");
    validate_cmd->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const CatalogEntry& c : catalog()) {
                std::cout << c.name << "\n  " << c.formula << "\n  parameters: "
                          << (c.parameters.empty() ? "none" : c.parameters) << "\n  constraints: " << c.constraints
                          << "\n";
            }
            return 0;
        }
        const Scenario s = parse_config(config);
        if (validate_cmd->parsed()) {
            std::cout << "ok " << s.name << " hash " << scenario_hash(s) << " (" << s.checks.size() << " checks)\n";
            return 0;
        }
        if (run->parsed()) return output(run_scenario(s), out_dir, format);
        if (refine->parsed()) return output(refinement_study(s, levels), out_dir, format);
    } catch (const ConfigError& e) {
        for (const auto& msg : e.errors()) std::cerr << msg << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
