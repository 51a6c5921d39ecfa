// Acceptance run: one PASS/FAIL line per criterion. Oracles are computed here,
// independently of the library, wherever a closed form exists.

#include "harnack/config.hpp"
#include "harnack/curvature.hpp"
#include "harnack/estimates.hpp"
#include "harnack/harness.hpp"
#include "harnack/operators.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace harnack;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

std::string scenario_path(const std::string& name) { return std::string(HARNACK_SCENARIO_DIR) + "/" + name + ".ini"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Grid line(int n) {
    const double l[] = {kTwoPi};
    const int c[] = {n};
    return make_torus_grid(1, l, c);
}

Grid square(int n) {
    const double l[] = {kTwoPi, kTwoPi};
    const int c[] = {n, n};
    return make_torus_grid(2, l, c);
}

double sup_abs(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s = std::max(s, std::abs(v));
    return s;
}

const CheckReport& find_check(const std::vector<CheckReport>& checks, const std::string& name,
                              const std::string& label = "") {
    for (const auto& r : checks) {
        if (r.name == name && r.label == label) return r;
    }
    throw std::runtime_error("no report for " + name);
}

const ConvergenceTable& find_table(const ReportBundle& b, const std::string& quantity) {
    for (const auto& t : b.convergence) {
        if (t.quantity == quantity) return t;
    }
    throw std::runtime_error("no convergence table " + quantity);
}

// Any negative margin must shrink by at least 2x under one refinement.
bool shrinks(double coarse, double fine) { return coarse >= 0.0 || fine >= 0.0 || fine >= 0.5 * coarse; }

// 1. Discrete Bochner identity on T^1(2pi), u = sin x, f = cos x.
Outcome bochner() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> sups;
    for (int n : {256, 512, 1024}) {
        const Grid g = line(n);
        const ScalarField u = sample(g, [](double x, double) { return std::sin(x); });
        const ScalarField f = sample(g, [](double x, double) { return std::cos(x); });
        sups.push_back(sup_abs(bochner_residual(u, f, BochnerIdentity{})));
    }
    const double elapsed = seconds_since(t0);
    const double o1 = std::log2(sups[0] / sups[1]), o2 = std::log2(sups[1] / sups[2]);
    const bool orders_ok = o1 >= 1.8 && o1 <= 2.2 && o2 >= 1.8 && o2 <= 2.2;
    const bool sup_ok = sups[0] <= 5e-4;
    return {sup_ok && orders_ok && elapsed < 1.0,
            "sup residual at n=256 " + num(sups[0]) + " (limit 5e-4), orders " + num(o1) + ", " + num(o2) +
                " (limits [1.8, 2.2]), " + num(elapsed) + " s"};
}

// 2. Li-Yau near-sharpness for the heat kernel.
Outcome li_yau_sharpness() {
    const auto t0 = std::chrono::steady_clock::now();
    Scenario s = parse_config(scenario_path("heat_gaussian"));
    s.checks.clear();
    s.solver.t_end = 0.1;
    s.solver.snapshot_count = 2;
    const Simulation sim = simulate(s);
    const SnapshotFields& f = sim.fields.back();
    double sup = -std::numeric_limits<double>::infinity(), lhs_abs = 0.0;
    for (std::size_t k = 0; k < f.w.size(); ++k) {
        const double v = f.grad_w_sq[k] / (f.w[k] * f.w[k]) - 2.0 * f.w_t[k] / f.w[k];
        sup = std::max(sup, v);
        lhs_abs = std::max(lhs_abs, std::abs(v));
    }
    const double bound = 1.0 / 0.1;  // m / t with m = 1
    const double tol = tolerance(Tolerances{}, f.w.grid.max_spacing(), lhs_abs, bound);
    const double elapsed = seconds_since(t0);
    const bool ok = std::abs(sup - bound) <= 0.05 * bound && sup <= bound + tol && elapsed < 10.0;
    return {ok, "t = " + num(f.t) + ": sup = " + num(sup) + " vs m/t = 10 (within 5%: " +
                    num(std::abs(sup - bound) / bound * 100.0) + "%), tol " + num(tol) + ", " + num(elapsed) + " s"};
}

// 3. Solver oracles.
Outcome solver_oracles() {
    const Scenario logistic = parse_config(scenario_path("logistic"));
    const Simulation ls = simulate(logistic, logistic.grid(), 1e-3);
    const double w1 = ls.trajectory.snapshots.back().w[0];
    const double logistic_err = std::abs(w1 - 0.268941);

    const Scenario fourier = parse_config(scenario_path("fourier_decay"));
    const Grid g256 = line(256);
    const Simulation fs = simulate(fourier, g256, 1e-4);
    const Snapshot& last = fs.trajectory.snapshots.back();
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < g256.size(); ++k) {
        const double exact = 2.0 + std::exp(-last.t) * std::sin(g256.node(k)[0]);
        err = std::max(err, std::abs(last.w[k] - exact));
        scale = std::max(scale, std::abs(exact));
    }
    const double rel = err / scale;

    const auto ratios = [](const ConvergenceTable& t) {
        std::vector<double> r;
        for (std::size_t i = 0; i + 1 < t.values.size(); ++i) r.push_back(t.values[i] / t.values[i + 1]);
        return r;
    };
    const auto dt_ratios = ratios(find_table(refinement_study(logistic, 3), "sup_error_at_t_end"));
    const auto h_ratios = ratios(find_table(refinement_study(fourier, 3), "sup_error_at_t_end"));
    bool ratios_ok = true;
    std::string rs = "dt ratios";
    for (double r : dt_ratios) {
        ratios_ok = ratios_ok && r >= 12.0 && r <= 20.0;
        rs += " " + num(r);
    }
    rs += ", h ratios";
    for (double r : h_ratios) {
        ratios_ok = ratios_ok && r >= 3.5 && r <= 4.5;
        rs += " " + num(r);
    }
    return {logistic_err <= 1e-6 && rel <= 1e-5 && ratios_ok,
            "|w(1) - 0.268941| = " + num(logistic_err) + ", Fourier relative error " + num(rel) + ", " + rs};
}

// 4. Hamilton estimate on the Fisher-KPP benchmark, with one refinement.
Outcome hamilton() {
    const auto t0 = std::chrono::steady_clock::now();
    Scenario s = parse_config(scenario_path("fisher_kpp"));
    std::erase_if(s.checks, [](const CheckSpec& c) { return c.name != "hamilton_bound"; });
    const ReportBundle b = refinement_study(s, 2);
    const ConvergenceTable& t = find_table(b, "min_margin:hamilton_bound");
    const CheckReport coarse_run = find_check(run_checks(s, simulate(s)), "hamilton_bound");
    const double elapsed = seconds_since(t0);
    const bool ok = coarse_run.min_margin >= -coarse_run.tolerance && shrinks(t.values[0], t.values[1]) &&
                    elapsed < 30.0;
    return {ok, "min margin " + num(coarse_run.min_margin) + " (tol " + num(coarse_run.tolerance) +
                    "), refined " + num(t.values[1]) + ", " + num(elapsed) + " s"};
}

// 5. Liouville: decay to a constant.
Outcome liouville() {
    const ReportBundle b = run_scenario(parse_config(scenario_path("liouville")));
    const CheckReport& r = find_check(b.checks, "liouville_assess");
    const double g = r.intermediates.at("sup_grad_sq_over_w_final");
    const double osc = r.intermediates.at("oscillation_final");
    const bool mono = r.intermediates.at("tail_monotone_grad") == 1.0 && r.intermediates.at("tail_monotone_oscillation") == 1.0;
    // Oscillation of 2 + e^{-t} sin x is 2 e^{-t}; at t = 20 that is 4.1e-9.
    const bool oracle = std::abs(osc - 2.0 * std::exp(-20.0)) <= 1e-10;
    return {g <= 1e-8 && osc <= 1e-8 && mono && oracle && r.verdict == Verdict::pass,
            "sup|grad w|^2/w = " + num(g) + ", oscillation " + num(osc) + " (2e^-20 = " + num(2.0 * std::exp(-20.0)) +
                "), tail monotone " + (mono ? "yes" : "no") + ", verdict " + to_string(r.verdict)};
}

// 6. Harnack on the Gaussian heat run, plus the constant hand case.
Outcome harnack_pairs() {
    const ReportBundle b = run_scenario(parse_config(scenario_path("heat_gaussian")));
    const CheckReport& r = find_check(b.checks, "harnack_bound");
    bool all = r.series.size() == 20;
    for (const SeriesPoint& p : r.series) all = all && p.min_margin >= 0.0;

    // Constant solution on T^2, x1 = x2, t1 = 0.1, t2 = 0.2, alpha = 2, eps = 1/2, m = 2:
    // Lambda = m a^2 / (2(1 - eps)) = 8 and the bound is (t2/t1)^4 e^{Lambda (t2 - t1)/a} = 16 e^{0.4}.
    const Scenario c = parse_config_text(R"(
[manifold]
dim = 2
lengths = ["2*pi", "2*pi"]
counts = [16, 16]
[initial]
w0 = "1"
[solver]
t_end = 0.2
snapshot_count = 41
[checks.harnack_bound]
m = 2
alpha = 2
epsilon = 0.5
t1 = 0.1
t2 = 0.2
x1 = [1, 2]
x2 = [1, 2]
)",
                                         "constant_harnack");
    const ReportBundle cb = run_scenario(c);
    const CheckReport& cr = find_check(cb.checks, "harnack_bound");
    const double bound = cr.intermediates.at("worst_pair_bound");
    const double expected = 16.0 * std::exp(0.4);
    const bool hand = std::abs(bound - expected) <= 1e-9 && cr.intermediates.at("Lambda") == 8.0;
    return {all && hand && r.verdict != Verdict::fail,
            std::to_string(r.series.size()) + " pairs, min margin " + num(r.min_margin) + "; constant case bound " +
                num(bound) + " vs 16e^0.4 = " + num(expected) + " (|diff| " + num(std::abs(bound - expected)) + ")"};
}

// 7. Hessian estimates on the Allen-Cahn run.
Outcome hessian_estimates() {
    Scenario s = parse_config(scenario_path("allen_cahn"));
    std::erase_if(s.checks, [](const CheckSpec& c) { return c.name != "hessian_global"; });
    const auto& p = s.checks.front().params;
    const bool params_ok = p.c == 1.0 && p.delta == 0.5 && p.beta == 1.0;
    const ReportBundle b = refinement_study(s, 2);
    const CheckReport coarse = find_check(run_checks(s, simulate(s)), "hessian_global");
    const CheckReport& fine = find_check(b.checks, "hessian_global");
    const double c0 = coarse.intermediates.at("required_C"), c1 = fine.intermediates.at("required_C");
    // Equal values (including both zero) count as ratio 1.
    const double ratio = (c0 == c1) ? 1.0 : std::max(c0, c1) / std::min(c0, c1);
    return {params_ok && coarse.min_margin >= -coarse.tolerance && ratio <= 1.2,
            "min margin " + num(coarse.min_margin) + " (tol " + num(coarse.tolerance) + "), required_C " + num(c0) +
                " -> " + num(c1) + " (ratio " + num(ratio) + ")"};
}

// 8. Reversed Harnack with the stated parameters.
Outcome reversed() {
    Scenario s = parse_config(scenario_path("fisher_kpp"));
    EstimateParams p;
    p.m = 2.0;
    p.alpha = 2.0;
    p.epsilon = 0.5;
    p.delta = 0.01;
    p.beta = 0.1;
    p.pairs = 10;
    p.t_range = std::array<double, 2>{0.25, 1.0};
    const std::vector<std::string> errors = validate_params("reversed_harnack", p, 1, s.solver.t_end, kTwoPi);

    const Simulation sim = simulate(s);
    const CheckReport r = reversed_harnack(make_window(*sim.model, sim.fields, 0.25), p, s.tolerances);
    bool all = r.series.size() == 10;
    for (const SeriesPoint& sp : r.series) all = all && sp.min_margin >= -r.tolerance;

    std::string detail = std::to_string(r.series.size()) + " pairs, min margin " + num(r.min_margin) +
                         " with the literal parameters";
    for (const auto& e : errors) detail += "; parameter window: " + e;
    return {errors.empty() && all, detail};
}

// 9. CD(K, m) residual for random trigonometric fields.
Outcome cd() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const double m = 4.0;
    bool ok = true;
    std::string detail;
    for (int trial = 0; trial < 5; ++trial) {
        double a[6], b[4];
        for (double& v : a) v = coef(rng);
        for (double& v : b) v = 0.3 * coef(rng);
        const auto u_fn = [&](double x, double y) {
            return a[0] * std::sin(x) + a[1] * std::cos(y) + a[2] * std::sin(x + y) + a[3] * std::cos(2.0 * x - y) +
                   a[4] * std::sin(2.0 * y) + a[5] * std::cos(x) * std::sin(y);
        };
        const auto f_fn = [&](double x, double y) {
            return b[0] * std::cos(x) + b[1] * std::sin(y) + b[2] * std::cos(x - y) + b[3] * std::sin(x) * std::sin(y);
        };
        double margins[2], tols[2];
        bool flags = true;
        for (int level = 0; level < 2; ++level) {
            const Grid g = square(level == 0 ? 48 : 96);
            const CheckReport r = cd_condition_field(sample(g, u_fn), sample(g, f_fn), m, std::nullopt, Tolerances{});
            margins[level] = r.min_margin;
            tols[level] = r.tolerance;
            for (const Flag& f : r.flags) flags = flags && f.holds;
        }
        const bool t_ok = margins[0] >= -tols[0] && margins[1] >= -tols[1] && shrinks(margins[0], margins[1]) && flags;
        ok = ok && t_ok;
        detail += (trial ? "; " : "") + num(margins[0]) + " -> " + num(margins[1]);
    }
    return {ok, "min residual (n=48 -> 96): " + detail};
}

// 10. Invariant suites.
Outcome invariants() {
    std::vector<std::string> failed;

    const ReportBundle cb = run_scenario(parse_config(scenario_path("constant")));
    bool constant_ok = cb.checks.size() == check_names().size();
    for (const CheckReport& r : cb.checks) {
        constant_ok = constant_ok && r.verdict != Verdict::fail && r.lhs_sup == 0.0 && r.min_margin == r.rhs_inf;
    }
    if (!constant_ok) failed.push_back("constant pass-through");

    // Scaling: w -> 1000 w with G = q = 0 leaves every log-gradient LHS unchanged.
    Scenario heat = parse_config(scenario_path("heat_2d"));
    heat.nonlinearity = nl::Zero{};
    heat.potential = PotentialSpec{};
    heat.checks.clear();
    for (const char* name : {"li_yau_compact", "li_yau_global", "li_yau_local"}) {
        CheckSpec c;
        c.name = name;
        c.params.m = 3.0;
        heat.checks.push_back(c);
    }
    Scenario scaled = heat;
    scaled.initial.w0 = Expression::parse("1000*(" + heat.initial.w0.source() + ")");
    const auto ra = run_scenario(heat).checks, rb = run_scenario(scaled).checks;
    bool scaling_ok = ra.size() == rb.size() && !ra.empty();
    for (std::size_t i = 0; scaling_ok && i < ra.size(); ++i) {
        scaling_ok = ra[i].series.size() == rb[i].series.size();
        for (std::size_t k = 0; scaling_ok && k < ra[i].series.size(); ++k) {
            const double x = ra[i].series[k].lhs_sup, y = rb[i].series[k].lhs_sup;
            scaling_ok = std::abs(x - y) <= 1e-10 * (1.0 + std::abs(x));
        }
    }
    if (!scaling_ok) failed.push_back("scaling invariance");

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    bool mono = true;
    for (int i = 0; i < 500; ++i) {
        const double arg = u(rng), k = u(rng), t1 = u(rng), t2 = u(rng), t3 = u(rng), bump = 0.1 + u(rng);
        const double m = 1.0 + u(rng), alpha = 1.05 + u(rng), eps = 0.05 + 0.45 * u(rng);
        const double lam = formulas::lambda_alpha_eps(arg, m, alpha, eps, k).value;
        mono = mono && lam <= formulas::lambda_alpha_eps(arg + bump, m, alpha, eps, k).value &&
               lam <= formulas::lambda_alpha_eps(arg, m, alpha, eps, k + bump).value;
        const double xi = formulas::hamilton_xi(k, t1, t2, t3);
        mono = mono && xi <= formulas::hamilton_xi(k + bump, t1, t2, t3) &&
               xi <= formulas::hamilton_xi(k, t1 + bump, t2, t3) && xi <= formulas::hamilton_xi(k, t1, t2 + bump, t3) &&
               xi <= formulas::hamilton_xi(k, t1, t2, t3 + bump);
        // N2 has no bound inputs; sweep it in m and beta inside the window.
        const double beta = 0.01 + 0.09 * u(rng) / 2.0;
        const double n2 = formulas::reversed_n2(m, 2.0, eps, beta);
        mono = mono && n2 <= formulas::reversed_n2(m + bump, 2.0, eps, beta) &&
               n2 <= formulas::reversed_n2(m, 2.0, eps, std::min(beta + 0.001, 0.107));
    }
    if (!mono) failed.push_back("monotonicity sweeps");

    const Scenario fk = parse_config(scenario_path("fisher_kpp"));
    if (to_json(run_scenario(fk), false) != to_json(run_scenario(fk), false)) failed.push_back("determinism");

    std::string detail = "constant pass-through (" + std::to_string(cb.checks.size()) +
                         " checks), scaling, monotonicity, determinism";
    for (const auto& f : failed) detail += "; failed: " + f;
    return {failed.empty(), detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 bochner identity", bochner},     {"2 li-yau sharpness", li_yau_sharpness},
        {"3 solver oracles", solver_oracles}, {"4 hamilton estimate", hamilton},
        {"5 liouville", liouville},          {"6 harnack", harnack_pairs},
        {"7 hessian estimates", hessian_estimates},    {"8 reversed harnack", reversed},
        {"9 cd condition", cd},              {"10 invariant suites", invariants},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
