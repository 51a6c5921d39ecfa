#include "harnack/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace harnack {

namespace {

using nlohmann::json;

ScalarField sample(const Grid& grid, const Expression& e, double t) {
    ScalarField out(grid, 0.0, t);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Point x = grid.node(k);
        out[k] = e.evaluate(x[0], x[1], t);
    }
    return out;
}

// JSON has no infinities; they travel as strings so read-back is exact.
json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double get_num(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw std::invalid_argument("bad number '" + s + "' in report");
    }
    return j.get<double>();
}

json num_map(const std::map<std::string, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = num(v);
    return j;
}

std::map<std::string, double> get_num_map(const json& j) {
    std::map<std::string, double> m;
    for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = get_num(it.value());
    return m;
}

json check_json(const CheckReport& r) {
    json j;
    j["name"] = r.name;
    j["label"] = r.label;
    j["params"] = num_map(r.params);
    j["text_params"] = r.text_params;
    j["min_margin"] = num(r.min_margin);
    j["argmin"] = {{"location", {num(r.argmin_location[0]), num(r.argmin_location[1])}}, {"time", num(r.argmin_time)}};
    j["lhs_sup"] = num(r.lhs_sup);
    j["rhs_inf"] = num(r.rhs_inf);
    json flags = json::array();
    for (const Flag& f : r.flags) flags.push_back({{"name", f.name}, {"holds", f.holds}, {"witness", f.witness}});
    j["flags"] = flags;
    j["notes"] = r.notes;
    j["tolerance"] = num(r.tolerance);
    j["verdict"] = to_string(r.verdict);
    j["intermediates"] = num_map(r.intermediates);
    json series = json::array();
    for (const SeriesPoint& s : r.series) {
        series.push_back({{"t", num(s.t)}, {"min_margin", num(s.min_margin)}, {"lhs_sup", num(s.lhs_sup)},
                          {"rhs_inf", num(s.rhs_inf)}});
    }
    j["series"] = series;
    return j;
}

CheckReport check_from_json(const json& j) {
    CheckReport r;
    r.name = j.at("name").get<std::string>();
    r.label = j.at("label").get<std::string>();
    r.params = get_num_map(j.at("params"));
    r.text_params = j.at("text_params").get<std::map<std::string, std::string>>();
    r.min_margin = get_num(j.at("min_margin"));
    const json& loc = j.at("argmin").at("location");
    r.argmin_location = {get_num(loc.at(0)), get_num(loc.at(1))};
    r.argmin_time = get_num(j.at("argmin").at("time"));
    r.lhs_sup = get_num(j.at("lhs_sup"));
    r.rhs_inf = get_num(j.at("rhs_inf"));
    for (const json& f : j.at("flags")) {
        r.flags.push_back({f.at("name").get<std::string>(), f.at("holds").get<bool>(), f.at("witness").get<std::string>()});
    }
    r.notes = j.at("notes").get<std::vector<std::string>>();
    r.tolerance = get_num(j.at("tolerance"));
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.intermediates = get_num_map(j.at("intermediates"));
    for (const json& s : j.at("series")) {
        r.series.push_back({get_num(s.at("t")), get_num(s.at("min_margin")), get_num(s.at("lhs_sup")),
                            get_num(s.at("rhs_inf"))});
    }
    return r;
}

std::string check_key(const CheckReport& r) { return r.label.empty() ? r.name : r.name + "." + r.label; }

std::string fmt17(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Simulation simulate(const Scenario& s, const Grid& grid, std::optional<double> dt) {
    Simulation sim;
    sim.model = std::make_unique<Model>(grid, s.weight, s.potential, s.nonlinearity);
    sim.w0 = sample(grid, s.initial.w0, 0.0);
    const double step = dt.value_or(stable_dt(*sim.model, s.solver.safety, sim.w0.min(), sim.w0.max()));
    sim.trajectory = evolve(*sim.model, sim.w0, s.solver.t_end, s.output_times(), step);
    sim.fields.reserve(sim.trajectory.snapshots.size());
    for (const Snapshot& snap : sim.trajectory.snapshots) {
        sim.fields.push_back(evaluate_fields(*sim.model, snap.w, snap.w_t));
    }
    return sim;
}

Simulation simulate(const Scenario& s) { return simulate(s, s.grid(), s.solver.dt); }

std::vector<CheckReport> run_checks(const Scenario& s, const Simulation& sim) {
    std::vector<CheckReport> out;
    for (const CheckSpec& c : s.checks) {
        const double t_min = c.params.t_min.value_or(0.05 * s.solver.t_end);
        const CheckWindow w = make_window(*sim.model, sim.fields, t_min);
        CheckReport r = run_check(c.name, w, c.params, s.tolerances);
        r.label = c.label;
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

void fill_metadata(ReportBundle& b, const Scenario& s, const Simulation& sim) {
    b.run.stats = sim.trajectory.stats;
    for (const Snapshot& snap : sim.trajectory.snapshots) b.run.snapshot_times.push_back(snap.t);
    const auto& norms = sim.trajectory.stats.steady_norms;
    b.run.steady = !norms.empty() && norms.back() < s.solver.steady_threshold;
}

ReportBundle empty_bundle(const Scenario& s) {
    ReportBundle b;
    b.scenario_name = s.name;
    b.scenario = normalized_scenario(s);
    b.scenario_hash = scenario_hash(s);
    return b;
}

}  // namespace

ReportBundle run_scenario(const Scenario& s) {
    const auto start = std::chrono::steady_clock::now();
    ReportBundle b = empty_bundle(s);
    try {
        const Simulation sim = simulate(s);
        fill_metadata(b, s, sim);
        b.checks = run_checks(s, sim);
    } catch (const SolverError& e) {
        b.abort = AbortInfo{e.what(), e.location(), e.time(), e.value()};
    }
    b.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return b;
}

std::vector<std::optional<double>> empirical_orders(const std::vector<double>& errors, double floor) {
    std::vector<std::optional<double>> out;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        const double a = std::abs(errors[i]), b = std::abs(errors[i + 1]);
        if (a < floor || b < floor) {
            out.emplace_back();
        } else {
            out.emplace_back(std::log2(a / b));
        }
    }
    return out;
}

ReportBundle refinement_study(const Scenario& s, int levels) {
    if (levels < 2) throw std::invalid_argument("refinement needs levels >= 2");
    const auto start = std::chrono::steady_clock::now();
    const bool grid_axis = s.solver.refine == "grid";
    const Grid base = s.grid();
    const std::size_t factor = grid_axis ? (std::size_t{1} << (levels - 1)) : 1;
    const std::size_t finest = base.size() * (base.dim == 2 ? factor * factor : factor);
    if (finest > kRefinementNodeBudget) {
        throw std::invalid_argument("refinement budget exceeded: " + std::to_string(finest) + " nodes > " +
                                    std::to_string(kRefinementNodeBudget));
    }
    double dt0 = 0.0;
    {
        const Model model(base, s.weight, s.potential, s.nonlinearity);
        const ScalarField w0 = sample(base, s.initial.w0, 0.0);
        dt0 = s.solver.dt.value_or(stable_dt(model, s.solver.safety, w0.min(), w0.max()));
    }

    ReportBundle b = empty_bundle(s);
    ConvergenceTable error_table{"sup_error_at_t_end", s.solver.refine, {}, {}, {}, {}};
    std::map<std::string, ConvergenceTable> margin_tables;
    std::vector<std::string> margin_order;
    for (int level = 0; level < levels; ++level) {
        const Grid grid = grid_axis ? base.refined(1 << level) : base;
        const double dt = grid_axis ? dt0 / std::pow(4.0, level) : dt0 / std::pow(2.0, level);
        Simulation sim;
        try {
            sim = simulate(s, grid, dt);
        } catch (const SolverError& e) {
            b.abort = AbortInfo{e.what(), e.location(), e.time(), e.value()};
            break;
        }
        const std::vector<CheckReport> reports = run_checks(s, sim);
        if (s.solver.reference) {
            const ScalarField& w_end = sim.trajectory.snapshots.back().w;
            const ScalarField ref = sample(grid, *s.solver.reference, w_end.time);
            double err = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) err = std::max(err, std::abs(w_end[k] - ref[k]));
            error_table.h.push_back(grid.max_spacing());
            error_table.dt.push_back(dt);
            error_table.values.push_back(err);
        }
        for (const CheckReport& r : reports) {
            const std::string key = check_key(r);
            if (!margin_tables.count(key)) {
                margin_tables[key] = ConvergenceTable{"min_margin:" + key, s.solver.refine, {}, {}, {}, {}};
                margin_order.push_back(key);
            }
            ConvergenceTable& t = margin_tables[key];
            t.h.push_back(grid.max_spacing());
            t.dt.push_back(dt);
            t.values.push_back(r.min_margin);
        }
        if (level == levels - 1) {
            fill_metadata(b, s, sim);
            b.checks = reports;
        }
    }
    if (!error_table.values.empty()) {
        error_table.orders = empirical_orders(error_table.values);
        b.convergence.push_back(error_table);
    }
    for (const auto& key : margin_order) {
        ConvergenceTable t = margin_tables[key];
        // Orders only mean something for shrinking violations.
        std::vector<double> neg;
        for (double v : t.values) neg.push_back(v < 0.0 ? -v : 0.0);
        t.orders = empirical_orders(neg);
        b.convergence.push_back(std::move(t));
    }
    b.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return b;
}

std::string to_json(const ReportBundle& b, bool include_timing) {
    json j;
    j["schema_version"] = b.schema_version;
    j["scenario"] = {{"name", b.scenario_name}, {"hash", b.scenario_hash}, {"config", json::parse(b.scenario)}};
    const RunStats& st = b.run.stats;
    json run;
    run["dt"] = num(st.dt);
    run["steps"] = st.steps;
    run["min_w"] = num(st.min_w);
    run["min_w_time"] = num(st.min_w_time);
    run["min_w_location"] = {num(st.min_w_location[0]), num(st.min_w_location[1])};
    run["max_w"] = num(st.max_w);
    json norms = json::array();
    for (double v : st.steady_norms) norms.push_back(num(v));
    run["steady_norms"] = norms;
    run["steady"] = b.run.steady;
    run["snapshot_times"] = b.run.snapshot_times;
    run["l2_squared_initial"] = num(st.l2_squared_initial);
    run["l2_squared_final"] = num(st.l2_squared_final);
    j["run"] = run;
    json checks = json::array();
    for (const CheckReport& r : b.checks) checks.push_back(check_json(r));
    j["checks"] = checks;
    json conv = json::array();
    for (const ConvergenceTable& t : b.convergence) {
        json orders = json::array();
        for (const auto& o : t.orders) orders.push_back(o ? json(*o) : json("n/a"));
        json values = json::array();
        for (double v : t.values) values.push_back(num(v));
        conv.push_back({{"quantity", t.quantity}, {"axis", t.axis}, {"h", t.h}, {"dt", t.dt}, {"values", values},
                        {"orders", orders}});
    }
    j["convergence"] = conv;
    if (b.abort) {
        j["abort"] = {{"message", b.abort->message},
                      {"location", {b.abort->location[0], b.abort->location[1]}},
                      {"time", num(b.abort->time)},
                      {"value", num(b.abort->value)}};
    }
    if (include_timing) j["timing"] = {{"wall_seconds", b.wall_seconds}};
    return j.dump(2) + "\n";
}

ReportBundle bundle_from_json(const std::string& text) {
    const json j = json::parse(text);
    ReportBundle b;
    b.schema_version = j.at("schema_version").get<int>();
    if (b.schema_version != kSchemaVersion) {
        throw std::invalid_argument("unsupported schema_version " + std::to_string(b.schema_version));
    }
    b.scenario_name = j.at("scenario").at("name").get<std::string>();
    b.scenario_hash = j.at("scenario").at("hash").get<std::string>();
    b.scenario = j.at("scenario").at("config").dump();
    const json& run = j.at("run");
    RunStats& st = b.run.stats;
    st.dt = get_num(run.at("dt"));
    st.steps = run.at("steps").get<long>();
    st.min_w = get_num(run.at("min_w"));
    st.min_w_time = get_num(run.at("min_w_time"));
    st.min_w_location = {get_num(run.at("min_w_location").at(0)), get_num(run.at("min_w_location").at(1))};
    st.max_w = get_num(run.at("max_w"));
    for (const json& v : run.at("steady_norms")) st.steady_norms.push_back(get_num(v));
    st.l2_squared_initial = get_num(run.at("l2_squared_initial"));
    st.l2_squared_final = get_num(run.at("l2_squared_final"));
    b.run.steady = run.at("steady").get<bool>();
    b.run.snapshot_times = run.at("snapshot_times").get<std::vector<double>>();
    for (const json& c : j.at("checks")) b.checks.push_back(check_from_json(c));
    for (const json& c : j.at("convergence")) {
        ConvergenceTable t;
        t.quantity = c.at("quantity").get<std::string>();
        t.axis = c.at("axis").get<std::string>();
        t.h = c.at("h").get<std::vector<double>>();
        t.dt = c.at("dt").get<std::vector<double>>();
        for (const json& v : c.at("values")) t.values.push_back(get_num(v));
        for (const json& o : c.at("orders")) {
            t.orders.push_back(o.is_string() ? std::optional<double>() : std::optional<double>(o.get<double>()));
        }
        b.convergence.push_back(std::move(t));
    }
    if (j.contains("abort")) {
        const json& a = j.at("abort");
        b.abort = AbortInfo{a.at("message").get<std::string>(),
                            {a.at("location").at(0).get<double>(), a.at("location").at(1).get<double>()},
                            get_num(a.at("time")),
                            get_num(a.at("value"))};
    }
    if (j.contains("timing")) b.wall_seconds = j.at("timing").at("wall_seconds").get<double>();
    return b;
}

std::string to_csv(const ReportBundle& b) {
    std::ostringstream os;
    os << "check,label,t,min_margin,lhs_sup,rhs_inf,tolerance,verdict\n";
    for (const CheckReport& r : b.checks) {
        for (const SeriesPoint& s : r.series) {
            os << r.name << ',' << r.label << ',' << fmt17(s.t) << ',' << fmt17(s.min_margin) << ','
               << fmt17(s.lhs_sup) << ',' << fmt17(s.rhs_inf) << ',' << fmt17(r.tolerance) << ','
               << to_string(r.verdict) << '\n';
        }
    }
    return os.str();
}

std::string to_plotdata(const ReportBundle& b) {
    // gnuplot: one index block per check, separated by two blank lines
    std::ostringstream os;
    bool first = true;
    for (const CheckReport& r : b.checks) {
        if (!first) os << "\n\n";
        first = false;
        os << "# " << check_key(r) << " verdict=" << to_string(r.verdict) << " tolerance=" << fmt17(r.tolerance)
           << "\n# t min_margin lhs_sup rhs_inf\n";
        for (const SeriesPoint& s : r.series) {
            os << fmt17(s.t) << ' ' << fmt17(s.min_margin) << ' ' << fmt17(s.lhs_sup) << ' ' << fmt17(s.rhs_inf)
               << '\n';
        }
    }
    return os.str();
}

void emit(const ReportBundle& b, const std::string& format, const std::string& path) {
    std::string text;
    if (format == "json") {
        text = to_json(b);
    } else if (format == "csv") {
        text = to_csv(b);
    } else if (format == "plotdata") {
        text = to_plotdata(b);
    } else {
        throw std::invalid_argument("unknown format '" + format + "' (json, csv, plotdata)");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

int exit_code(const ReportBundle& b) {
    if (b.abort) return 2;
    for (const CheckReport& r : b.checks) {
        if (r.verdict == Verdict::fail) return 1;
    }
    return 0;
}

}  // namespace harnack
