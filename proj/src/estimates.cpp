#include "harnack/estimates.hpp"

#include "harnack/curvature.hpp"
#include "harnack/cutoff.hpp"
#include "harnack/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace harnack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::numbers::sqrt2;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

std::string at(const Point& p, double t) {
    return "(x, y) = (" + fmt(p[0]) + ", " + fmt(p[1]) + "), t = " + fmt(t);
}

double resolve_m(const EstimateParams& p, int dim) { return p.m > 0.0 ? p.m : static_cast<double>(dim); }

/// Collects LHS/RHS samples into a report.
class Margins {
public:
    explicit Margins(CheckReport& r) : r_(r) {}

    void add(double t, const Point& x, double lhs, double rhs) {
        const double margin = rhs - lhs;
        if (margin < r_.min_margin) {
            r_.min_margin = margin;
            r_.argmin_location = x;
            r_.argmin_time = t;
        }
        r_.lhs_sup = std::max(r_.lhs_sup, lhs);
        r_.rhs_inf = std::min(r_.rhs_inf, rhs);
        lhs_abs_ = std::max(lhs_abs_, std::abs(lhs));
        rhs_abs_ = std::max(rhs_abs_, std::abs(rhs));
        ++count_;
    }

    /// One snapshot's fields; nodes with mask[k] == 0 are skipped.
    void add_fields(double t, const ScalarField& lhs, const ScalarField& rhs, const std::vector<char>* mask = nullptr) {
        SeriesPoint sp{t, kInf, -kInf, kInf};
        for (std::size_t k = 0; k < lhs.size(); ++k) {
            if (mask && !(*mask)[k]) continue;
            add(t, lhs.grid.node(k), lhs[k], rhs[k]);
            sp.min_margin = std::min(sp.min_margin, rhs[k] - lhs[k]);
            sp.lhs_sup = std::max(sp.lhs_sup, lhs[k]);
            sp.rhs_inf = std::min(sp.rhs_inf, rhs[k]);
        }
        if (sp.min_margin < kInf) r_.series.push_back(sp);
    }

    void add_point(double t, const Point& x, double lhs, double rhs) {
        add(t, x, lhs, rhs);
        r_.series.push_back({t, rhs - lhs, lhs, rhs});
    }

    void finish(const Tolerances& tol, double h) {
        if (count_ == 0) throw std::invalid_argument(r_.name + ": nothing to evaluate in the window");
        r_.tolerance = tolerance(tol, h, lhs_abs_, rhs_abs_);
        assign_verdict(r_);
    }

    static void assign_verdict(CheckReport& r) {
        if (r.min_margin < -r.tolerance) {
            r.verdict = Verdict::fail;
        } else if (std::any_of(r.flags.begin(), r.flags.end(), [](const Flag& f) { return !f.holds; })) {
            r.verdict = Verdict::pass_with_flags;
        } else {
            r.verdict = Verdict::pass;
        }
    }

private:
    CheckReport& r_;
    double lhs_abs_ = 0.0;
    double rhs_abs_ = 0.0;
    std::size_t count_ = 0;
};

CheckReport start(const std::string& name, const CheckWindow& w) {
    CheckReport r;
    r.name = name;
    r.params["t_start"] = w.fields.front().t;
    r.params["t_end"] = w.fields.back().t;
    return r;
}

void echo_bounds(CheckReport& r, const BoundSet& b) {
    r.intermediates["theta1"] = b.theta1;
    r.intermediates["theta2"] = b.theta2;
    r.intermediates["theta3"] = b.theta3;
    r.intermediates["theta4"] = b.theta4;
    r.intermediates["K1"] = b.k1;
    r.intermediates["K2"] = b.k2;
    r.intermediates["K3"] = b.k3;
    r.intermediates["K4"] = b.k4;
    r.intermediates["K5"] = b.k5;
    r.intermediates["K6"] = b.k6;
    r.intermediates["K7"] = b.k7;
    r.intermediates["K8"] = b.k8;
}

double spacing(const CheckWindow& w) { return w.fields.front().w.grid.max_spacing(); }

Point default_center(const Grid& g) { return {0.5 * g.lengths[0], g.dim == 2 ? 0.5 * g.lengths[1] : 0.0}; }
double default_radius(const Grid& g) { return 0.2 * g.min_length(); }

/// Window length T of the Hessian estimates.
double window_length(const CheckWindow& w) {
    const double len = w.t_end - w.fields.front().t;
    return len > 0.0 ? len : w.t_end;
}

Flag lambda_flag(const formulas::LambdaValue& lv, double arg) {
    return {"Lambda square-root argument >= 0", !lv.clamped, "windowed sup = " + fmt(arg)};
}

struct HessConstants {
    double lambda_h, omega, a, b, t_len;
};

HessConstants hess_constants(const CheckWindow& w, const EstimateParams& p, std::optional<double> r) {
    const BoundSet& b = w.bounds;
    HessConstants hc;
    hc.t_len = window_length(w);
    hc.lambda_h = formulas::hess_lambda(p.c, b.k1, b.k6, b.k7, b.k8);
    hc.omega = formulas::hess_omega(p.c, b.k2, b.k3, p.beta);
    hc.a = formulas::hess_a(hc.omega, b.k4, b.k5, p.c, p.delta, p.beta, hc.t_len, r, b.k1);
    hc.b = formulas::hess_b(hc.omega, hc.lambda_h, p.c, p.delta, p.beta, hc.t_len);
    return hc;
}

void echo_hess(CheckReport& r, const EstimateParams& p, const HessConstants& hc) {
    r.params["beta"] = p.beta;
    r.params["delta"] = p.delta;
    r.params["C"] = p.c;
    r.intermediates["Lambda_hess"] = hc.lambda_h;
    r.intermediates["Omega"] = hc.omega;
    r.intermediates["A_hess"] = hc.a;
    r.intermediates["B_hess"] = hc.b;
    r.intermediates["T"] = hc.t_len;
}

double hessian_norm(const SnapshotFields& s, std::size_t k) { return std::sqrt(s.hess_w.frobenius_squared(k)); }

/// Smallest C >= 0 with min over samples of (slack_k + const(C)) >= 0, where
/// const(C) = sqrt2 A(C)^{1/2} + sqrt2 B(C) is increasing in C. `worst` is the
/// minimum over samples of the C-independent part RHS - LHS.
double required_c(double worst, const std::function<double(double)>& constant_part) {
    const auto ok = [&](double c) { return worst + constant_part(c) >= 0.0; };
    if (ok(0.0)) return 0.0;
    double hi = 1.0;
    while (!ok(hi)) {
        hi *= 2.0;
        if (hi > 1e15) return kInf;
    }
    double lo = 0.0;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

// ---- space-time interpolation for the Harnack-type checks ----

double interp_space(const ScalarField& f, const Point& x) {
    const Grid& g = f.grid;
    const double u = x[0] / g.spacing[0];
    const double i0f = std::floor(u);
    const double fx = u - i0f;
    const int i0 = static_cast<int>(i0f);
    if (g.dim == 1) return (1.0 - fx) * f[g.index(i0)] + fx * f[g.index(i0 + 1)];
    const double v = x[1] / g.spacing[1];
    const double j0f = std::floor(v);
    const double fy = v - j0f;
    const int j0 = static_cast<int>(j0f);
    return (1.0 - fx) * (1.0 - fy) * f[g.index(i0, j0)] + fx * (1.0 - fy) * f[g.index(i0 + 1, j0)] +
           (1.0 - fx) * fy * f[g.index(i0, j0 + 1)] + fx * fy * f[g.index(i0 + 1, j0 + 1)];
}

struct TimeFields {
    std::vector<double> times;
    std::vector<ScalarField> fields;

    double operator()(const Point& x, double t) const {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t i = static_cast<std::size_t>(std::distance(times.begin(), it));
        if (i == 0) throw std::invalid_argument("time " + fmt(t) + " before the first stored snapshot");
        --i;
        if (times[i] == t || i + 1 == times.size()) {
            if (t > times[i] && i + 1 == times.size()) {
                throw std::invalid_argument("time " + fmt(t) + " after the last stored snapshot");
            }
            return interp_space(fields[i], x);
        }
        const double s = (t - times[i]) / (times[i + 1] - times[i]);
        return (1.0 - s) * interp_space(fields[i], x) + s * interp_space(fields[i + 1], x);
    }

    double max_gap(double t1, double t2) const {
        double gap = 0.0;
        for (std::size_t i = 0; i + 1 < times.size(); ++i) {
            if (times[i + 1] <= t1 || times[i] >= t2) continue;
            gap = std::max(gap, times[i + 1] - times[i]);
        }
        return gap;
    }
};

/// Fields the Harnack integrand needs, over the whole trajectory.
struct HarnackData {
    TimeFields w;
    TimeFields integrand;  // (a - 2)/(2a) |grad u|^2 - q - G~
};

HarnackData harnack_data(std::span<const SnapshotFields> all, double alpha) {
    HarnackData d;
    for (const SnapshotFields& s : all) {
        ScalarField integ(s.w.grid, 0.0, s.t);
        for (std::size_t k = 0; k < s.w.size(); ++k) {
            const double wk = s.w[k];
            integ[k] = (alpha - 2.0) / (2.0 * alpha) * s.grad_w_sq[k] / (wk * wk) - s.q[k] - s.nl.g_tilde[k];
        }
        d.w.times.push_back(s.t);
        d.w.fields.push_back(s.w);
        d.integrand.times.push_back(s.t);
        d.integrand.fields.push_back(std::move(integ));
    }
    return d;
}

constexpr int kHarnackSubintervals = 128;  // multiple of 4 so path breakpoints fall on nodes
constexpr int kSampledPaths = 32;

/// Piecewise-linear path through x1 + waypoint offsets at fractions 1/4, 1/2, 3/4.
struct Path {
    std::array<Point, 5> knots;
};

double path_integral(const HarnackData& d, const Path& path, double t1, double t2) {
    const double tau = t2 - t1;
    const double seg = tau / 4.0;
    double kinetic = 0.0;
    for (int s = 0; s < 4; ++s) {
        const double dx = path.knots[s + 1][0] - path.knots[s][0];
        const double dy = path.knots[s + 1][1] - path.knots[s][1];
        kinetic += 0.5 * (dx * dx + dy * dy) / seg;
    }
    const int n = kHarnackSubintervals;
    const double dt = tau / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = (i == n) ? t2 : t1 + i * dt;
        const double frac = static_cast<double>(i) / n * 4.0;
        const int s = std::min(3, static_cast<int>(std::floor(frac)));
        const double r = frac - s;
        const Point x{(1.0 - r) * path.knots[s][0] + r * path.knots[s + 1][0],
                      (1.0 - r) * path.knots[s][1] + r * path.knots[s + 1][1]};
        const double weight = (i == 0 || i == n) ? 0.5 : 1.0;
        sum += weight * d.integrand(x, t);
    }
    return sum * dt + kinetic;
}

HarnackPair harnack_pair_impl(const HarnackData& d, const Grid& grid, const EstimateParams& p, double m, double lambda,
                              const Point& x1_in, double t1, const Point& x2_in, double t2) {
    if (!(t2 > t1)) throw std::invalid_argument("harnack: t1 < t2 required");
    const double gap = d.w.max_gap(t1, t2);
    if (gap > (t2 - t1) / 16.0 * (1.0 + 1e-12)) {
        throw std::invalid_argument("harnack: snapshot spacing " + fmt(gap) + " exceeds (t2 - t1)/16 = " +
                                    fmt((t2 - t1) / 16.0));
    }
    HarnackPair hp;
    hp.x1 = grid.node(grid.nearest_node(x1_in));
    hp.x2 = grid.node(grid.nearest_node(x2_in));
    hp.t1 = t1;
    hp.t2 = t2;
    hp.log_ratio = std::log(d.w(hp.x1, t1)) - std::log(d.w(hp.x2, t2));

    const double dx = periodic_displacement(hp.x1[0], hp.x2[0], grid.lengths[0]);
    const double dy = grid.dim == 2 ? periodic_displacement(hp.x1[1], hp.x2[1], grid.lengths[1]) : 0.0;
    Path straight;
    for (int s = 0; s <= 4; ++s) straight.knots[s] = {hp.x1[0] + 0.25 * s * dx, hp.x1[1] + 0.25 * s * dy};
    hp.straight_integral = path_integral(d, straight, t1, t2);
    hp.path_integral = hp.straight_integral;

    if (p.path_policy == "sampled") {
        std::mt19937_64 rng(p.seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const double amp = 0.1 * grid.min_length();
        for (int k = 0; k < kSampledPaths; ++k) {
            Path path = straight;
            for (int s = 1; s <= 3; ++s) {
                path.knots[s][0] += amp * unit(rng);
                if (grid.dim == 2) path.knots[s][1] += amp * unit(rng);
            }
            hp.path_integral = std::min(hp.path_integral, path_integral(d, path, t1, t2));
        }
    }
    const double power = m * p.alpha / (2.0 * (1.0 - p.epsilon));
    hp.log_bound = power * std::log(t2 / t1) + lambda / p.alpha * (t2 - t1) + hp.path_integral;
    return hp;
}

/// (t1, t2) pairs drawn from stored snapshot times inside [lo, hi] that respect the cadence rule.
std::vector<std::array<double, 2>> sample_time_pairs(const TimeFields& tf, double lo, double hi, int count,
                                                     std::mt19937_64& rng) {
    std::vector<double> ts;
    for (double t : tf.times) {
        if (t >= lo - 1e-12 && t <= hi + 1e-12) ts.push_back(t);
    }
    std::vector<std::array<double, 2>> admissible;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            if (ts[i] > 0.0 && tf.max_gap(ts[i], ts[j]) <= (ts[j] - ts[i]) / 16.0 * (1.0 + 1e-12)) {
                admissible.push_back({ts[i], ts[j]});
            }
        }
    }
    if (admissible.empty()) {
        throw std::invalid_argument("no snapshot pair in [" + fmt(lo) + ", " + fmt(hi) +
                                    "] satisfies the cadence rule dt_snap <= (t2 - t1)/16; store more snapshots");
    }
    std::uniform_int_distribution<std::size_t> pick(0, admissible.size() - 1);
    std::vector<std::array<double, 2>> out;
    for (int i = 0; i < count; ++i) out.push_back(admissible[pick(rng)]);
    return out;
}

Point random_node(const Grid& g, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    return g.node(pick(rng));
}

double hamilton_ceiling(const CheckWindow& w, const EstimateParams& p, double& sup_w) {
    sup_w = 0.0;
    for (const SnapshotFields& s : w.fields) sup_w = std::max(sup_w, s.w.max());
    const double a = p.a_ceiling.value_or(std::numbers::e * (1.0 + 1e-6) * sup_w);
    if (sup_w > a / std::numbers::e) {
        throw std::invalid_argument("Hamilton ceiling violated: sup w = " + fmt(sup_w) + " > A/e = " +
                                    fmt(a / std::numbers::e));
    }
    return a;
}

void add_theta_flags(CheckReport& r, const BoundSet& b) {
    for (const char* key : {"theta1", "theta2", "theta3", "theta4"}) {
        const auto it = b.provenance.find(key);
        r.flags.push_back({std::string(key) + " provenance", true, it == b.provenance.end() ? "" : it->second});
    }
}

}  // namespace

double tolerance(const Tolerances& tol, double h, double lhs_sup_abs, double rhs_sup_abs) {
    return tol.tau_abs + tol.tau_disc * h * h * (1.0 + lhs_sup_abs + rhs_sup_abs);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::pass_with_flags: return "pass-with-flags";
        case Verdict::fail: return "fail";
    }
    return "fail";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "pass") return Verdict::pass;
    if (s == "pass-with-flags") return Verdict::pass_with_flags;
    if (s == "fail") return Verdict::fail;
    throw std::invalid_argument("unknown verdict '" + s + "'");
}

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names{
        "li_yau_compact",  "li_yau_global",  "li_yau_local", "harnack_bound",    "hamilton_bound", "liouville_assess",
        "hessian_global",  "hessian_local",  "ly_hessian",   "reversed_harnack", "hamilton_hessian", "cd_condition"};
    return names;
}

bool is_trajectory_check(const std::string& name) {
    return name == "harnack_bound" || name == "liouville_assess" || name == "reversed_harnack";
}

std::vector<std::string> validate_params(const std::string& check, const EstimateParams& p, int dim, double t_end,
                                         double min_length) {
    std::vector<std::string> errs;
    const auto need = [&](bool ok, const std::string& msg) {
        if (!ok) errs.push_back(msg);
    };
    if (std::find(check_names().begin(), check_names().end(), check) == check_names().end()) {
        errs.push_back("unknown check '" + check + "'");
        return errs;
    }
    const bool uses_alpha = check == "li_yau_global" || check == "li_yau_local" || check == "harnack_bound" ||
                            check == "ly_hessian" || check == "reversed_harnack";
    const bool uses_m = uses_alpha || check == "li_yau_compact" || check == "cd_condition";
    const bool hessian = check == "hessian_global" || check == "hessian_local" || check == "ly_hessian" ||
                         check == "reversed_harnack" || check == "hamilton_hessian";

    if (uses_m && p.m != 0.0) {
        need(p.m >= dim, "m >= n required (m = " + fmt(p.m) + ", n = " + std::to_string(dim) + ")");
    }
    if (uses_alpha) {
        need(p.alpha > 1.0, "alpha > 1 required (alpha = " + fmt(p.alpha) + ")");
        need(p.epsilon > 0.0 && p.epsilon < 1.0, "0 < epsilon < 1 required (epsilon = " + fmt(p.epsilon) + ")");
    }
    if (hessian) {
        need(p.delta > 0.0 && p.delta < 1.0, "0 < delta < 1 required (delta = " + fmt(p.delta) + ")");
        if (p.delta > 0.0 && p.delta < 1.0) {
            const double beta_min = std::sqrt(p.delta / (1.0 - p.delta));
            need(p.beta >= beta_min, "beta >= sqrt(delta/(1-delta)) = " + fmt(beta_min) +
                                         " required (beta = " + fmt(p.beta) + ", delta = " + fmt(p.delta) + ")");
        }
        need(p.beta > 0.0, "beta > 0 required (beta = " + fmt(p.beta) + ")");
        need(p.c > 0.0, "C > 0 required (C = " + fmt(p.c) + ")");
    }
    if (check == "reversed_harnack") {
        const double kh = formulas::kHessFactor;
        const double delta_max = 1.0 / (1.0 + kh * kh * p.alpha * p.alpha);
        const double beta_max = 1.0 / (kh * p.alpha);
        need(p.delta <= delta_max, "delta <= 1/(1+(4sqrt2-1)^2 alpha^2) = " + fmt(delta_max) +
                                       " required (delta = " + fmt(p.delta) + ")");
        need(p.beta < beta_max, "beta < 1/((4sqrt2-1) alpha) = " + fmt(beta_max) +
                                    " required for a positive denominator (beta = " + fmt(p.beta) + ")");
        if (p.radius) need(*p.radius > 0.0, "R > 0 required (R = " + fmt(*p.radius) + ")");
    }
    if (check == "li_yau_local" && p.radius) {
        need(*p.radius > 0.0 && 2.0 * *p.radius < 0.5 * min_length,
             "0 < 2R < min(L)/2 = " + fmt(0.5 * min_length) + " required (R = " + fmt(*p.radius) + ")");
    }
    if (check == "hessian_local" && p.radius) {
        need(*p.radius > 0.0 && *p.radius < 0.5 * min_length,
             "0 < R < min(L)/2 = " + fmt(0.5 * min_length) + " required (R = " + fmt(*p.radius) + ")");
    }
    if (p.t_min) {
        need(*p.t_min > 0.0 && *p.t_min < t_end,
             "0 < t_min < T required (t_min = " + fmt(*p.t_min) + ", T = " + fmt(t_end) + ")");
    }
    if (p.a_ceiling) need(*p.a_ceiling > 0.0, "A > 0 required (A = " + fmt(*p.a_ceiling) + ")");
    if (check == "harnack_bound" || check == "reversed_harnack") {
        need(p.pairs >= 1, "pairs >= 1 required (pairs = " + std::to_string(p.pairs) + ")");
        need(p.path_policy == "straight" || p.path_policy == "sampled",
             "path_policy must be straight or sampled (got " + p.path_policy + ")");
        if (p.t1 && p.t2) {
            need(*p.t1 > 0.0 && *p.t1 < *p.t2 && *p.t2 <= t_end,
                 "0 < t1 < t2 <= T required (t1 = " + fmt(*p.t1) + ", t2 = " + fmt(*p.t2) + ")");
        }
        if (p.t_range) {
            need((*p.t_range)[0] > 0.0 && (*p.t_range)[0] < (*p.t_range)[1],
                 "0 < t_range[0] < t_range[1] required");
        }
    }
    if (check == "liouville_assess") need(p.threshold > 0.0, "threshold > 0 required");
    return errs;
}

CheckWindow make_window(const Model& model, std::span<const SnapshotFields> all, double t_min) {
    if (all.empty()) throw std::invalid_argument("empty trajectory");
    CheckWindow w;
    w.model = &model;
    w.all = all;
    w.t_end = all.back().t;
    const double eps = 1e-12 * std::max(1.0, std::abs(w.t_end));
    std::size_t first = 0;
    while (first < all.size() && all[first].t < t_min - eps) ++first;
    if (first == all.size()) throw std::invalid_argument("no snapshot at or after t_min = " + fmt(t_min));
    w.fields = all.subspan(first);
    w.bounds = sample_bounds(w.fields, model.nonlinearity());
    return w;
}

namespace formulas {

LambdaValue lambda_alpha_eps(double arg_sup, double m, double alpha, double eps, double k) {
    if (!(alpha > 1.0)) throw std::invalid_argument("alpha > 1 required");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("0 < epsilon < 1 required");
    LambdaValue lv;
    lv.clamped = arg_sup < 0.0;
    const double a2 = alpha * alpha;
    lv.value = std::sqrt(std::max(0.0, arg_sup)) + m * a2 * k / ((1.0 - eps) * (alpha - 1.0)) +
               m * a2 / (2.0 * (1.0 - eps));
    return lv;
}

double hamilton_xi(double k, double theta1, double theta2, double theta3) {
    return 2.0 * k + theta1 + theta2 + theta3 + 1.0;
}

double hamilton_eta(double k1, double k6, double k7, double theta3) { return 2.0 * k1 + k6 + k7 + theta3 + 1.0; }

double local_a_const(double m, double c1, double c2, double r, double k) {
    return ((m - 1.0) * c1 * (1.0 + r * std::sqrt(k)) + c2 + 2.0 * c1 * c1) / (r * r);
}

double hess_lambda(double c, double k1, double k6, double k7, double k8) {
    return std::max(2.0 * k6 + c * k1 + k7, 2.0 * k1 + 4.0 * k6 + 4.0 * k8);
}

double hess_omega(double c, double k2, double k3, double beta) { return 2.0 * k3 + c * k2 + 2.0 * beta * k3; }

double hess_a(double omega, double k4, double k5, double c, double delta, double beta, double t_len,
              std::optional<double> r, double k1) {
    const double db = delta * beta;
    double a = omega / (delta * beta * beta) + (k4 + k5) / db + c / (db * db * t_len * t_len);
    if (r) {
        const double r2 = *r * *r;
        const double b3 = beta * beta * beta;
        a += c / (delta * delta * delta * delta * b3 * b3 * r2 * r2) + c / (db * db) * (1.0 / (r2 * r2) + k1 / r2);
    }
    return a;
}

double hess_b(double omega, double lambda_h, double c, double delta, double beta, double t_len) {
    const double db = delta * beta;
    return (omega + lambda_h) / db + 2.0 * c * c / (db * t_len * t_len);
}

double reversed_n1(double k6, double k7, double lambda, double a, double b, double beta, double alpha) {
    const double denom = 1.0 - kHessFactor * beta * alpha;
    if (!(denom > 0.0)) throw std::invalid_argument("1 - (4sqrt2-1) beta alpha must be positive");
    return (k6 + k7 + kHessFactor * beta * lambda + kSqrt2 * std::sqrt(a) + kSqrt2 * b) / denom;
}

double reversed_n2(double m, double alpha, double eps, double beta) {
    const double denom = 1.0 - kHessFactor * beta * alpha;
    if (!(denom > 0.0)) throw std::invalid_argument("1 - (4sqrt2-1) beta alpha must be positive");
    return kHessFactor * beta * m * alpha * alpha / (2.0 * (1.0 - eps) * denom);
}

}  // namespace formulas

double lambda_sqrt_arg_sup(std::span<const SnapshotFields> fields, double m, double alpha, double eps,
                           const std::vector<char>* mask) {
    double sup = -kInf;
    const double c1 = m * alpha * alpha * alpha / (2.0 * (1.0 - eps));
    const double c2 = alpha * alpha * (alpha - 1.0) * m / (1.0 - eps);
    for (const SnapshotFields& s : fields) {
        for (std::size_t k = 0; k < s.w.size(); ++k) {
            if (mask && !(*mask)[k]) continue;
            const double v = c1 * (s.lf_q[k] + s.nl.lf_g_tilde[k]) +
                             c2 * (s.grad_q.norm_squared(k) + s.nl.grad_g_tilde.norm_squared(k));
            sup = std::max(sup, v);
        }
    }
    return sup;
}

double window_bakry_emery_k(std::span<const SnapshotFields> fields, double m) {
    double k = 0.0;
    for (const SnapshotFields& s : fields) {
        if (std::isinf(m)) {
            k = std::max(k, s.k_ricf);
        } else {
            k = std::max(k, bakry_emery(s.f, BakryEmeryVariant::finite(m)).k);
        }
    }
    return k;
}

// ---------------------------------------------------------------------------

CheckReport li_yau_compact(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("li_yau_compact", w);
    const double m = resolve_m(p, w.fields.front().w.grid.dim);
    const double k = window_bakry_emery_k(w.fields, m);
    r.params["m"] = m;
    r.intermediates["K"] = k;
    echo_bounds(r, w.bounds);

    Margins mg(r);
    double lf_min = kInf;
    Point lf_min_x{};
    double lf_min_t = 0.0;
    for (const SnapshotFields& s : w.fields) {
        if (!(s.t > 0.0)) throw std::invalid_argument("li_yau_compact: t > 0 required");
        ScalarField lhs(s.w.grid, 0.0, s.t), rhs(s.w.grid, 0.0, s.t);
        for (std::size_t i = 0; i < s.w.size(); ++i) {
            const double wi = s.w[i];
            lhs[i] = s.grad_w_sq[i] / (wi * wi) - 2.0 * s.w_t[i] / wi - 2.0 * s.nl.g[i] / wi;
            rhs[i] = m / s.t + std::sqrt(2.0 * m * std::abs(s.nl.lf_g_tilde[i])) + m * k;
            if (s.nl.lf_g_tilde[i] < lf_min) {
                lf_min = s.nl.lf_g_tilde[i];
                lf_min_x = s.w.grid.node(i);
                lf_min_t = s.t;
            }
        }
        mg.add_fields(s.t, lhs, rhs);
    }
    r.flags.push_back({"L_f G~ >= 0", lf_min >= 0.0, "min L_f G~ = " + fmt(lf_min) + " at " + at(lf_min_x, lf_min_t)});
    r.flags.push_back({"q == 0", w.bounds.theta1 == 0.0, "sup |q| = " + fmt(w.bounds.theta1)});
    r.notes.push_back("the sign hypothesis L_f G~ >= 0 is used in the derivation but absent from the statement; "
                      "it is reported as a flag only");
    mg.finish(tol, spacing(w));
    return r;
}

CheckReport li_yau_global(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("li_yau_global", w);
    const double m = resolve_m(p, w.fields.front().w.grid.dim);
    const double k = window_bakry_emery_k(w.fields, m);
    const double arg = lambda_sqrt_arg_sup(w.fields, m, p.alpha, p.epsilon);
    const auto lv = formulas::lambda_alpha_eps(arg, m, p.alpha, p.epsilon, k);
    r.params["m"] = m;
    r.params["alpha"] = p.alpha;
    r.params["epsilon"] = p.epsilon;
    r.intermediates["K"] = k;
    r.intermediates["Lambda"] = lv.value;
    r.intermediates["Lambda_sqrt_arg_sup"] = arg;
    echo_bounds(r, w.bounds);
    r.flags.push_back(lambda_flag(lv, arg));

    Margins mg(r);
    const double a = p.alpha;
    for (const SnapshotFields& s : w.fields) {
        ScalarField lhs(s.w.grid, 0.0, s.t), rhs(s.w.grid, 0.0, s.t);
        const double singular = m * a * a / (2.0 * s.t * (1.0 - p.epsilon));
        for (std::size_t i = 0; i < s.w.size(); ++i) {
            const double wi = s.w[i];
            lhs[i] = s.grad_w_sq[i] / (wi * wi) - a * s.w_t[i] / wi - a * s.q[i] - a * s.nl.g_tilde[i];
            rhs[i] = singular + lv.value;
        }
        mg.add_fields(s.t, lhs, rhs);
    }
    mg.finish(tol, spacing(w));
    return r;
}

CheckReport li_yau_local(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("li_yau_local", w);
    const Grid& grid = w.fields.front().w.grid;
    const double m = resolve_m(p, grid.dim);
    const double radius = p.radius.value_or(default_radius(grid));
    const Point center = p.center.value_or(default_center(grid));
    const Cutoff cut = build_cutoff(center, radius, grid);
    const double k = window_bakry_emery_k(w.fields, m);
    const double a = p.alpha, eps = p.epsilon;
    const double r2 = radius * radius;

    std::vector<char> mask(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) mask[i] = cut.in_support(i) ? 1 : 0;

    // The comparison bounds for phi are verified on the grid, not assumed.
    double lf_phi_min = kInf, grad_phi_ratio = 0.0;
    for (const SnapshotFields& s : w.fields) {
        const ScalarField lf_phi = weighted_laplacian(cut.phi, s.grad_f);
        const VectorField grad_phi = gradient(cut.phi);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!mask[i]) continue;
            lf_phi_min = std::min(lf_phi_min, lf_phi[i]);
            if (cut.phi[i] > 0.0) grad_phi_ratio = std::max(grad_phi_ratio, grad_phi.norm_squared(i) / cut.phi[i]);
        }
    }
    const double x_paper = (m - 1.0) * cut.c1 * (1.0 + radius * std::sqrt(k)) + cut.c2;
    const double x_obs = -r2 * lf_phi_min;
    const double c1_sq = std::max(cut.c1 * cut.c1, r2 * grad_phi_ratio);
    const double a_paper = formulas::local_a_const(m, cut.c1, cut.c2, radius, k);
    const double a_used = (std::max(x_paper, x_obs) + 2.0 * c1_sq) / r2;
    r.flags.push_back({"L_f phi >= -((m-1)C1(1+R sqrt K)+C2)/R^2", x_obs <= x_paper,
                       "observed inf L_f phi = " + fmt(lf_phi_min) + ", bound = " + fmt(-x_paper / r2)});
    r.flags.push_back({"|grad phi|^2/phi <= C1^2/R^2", r2 * grad_phi_ratio <= cut.c1 * cut.c1,
                       "observed sup = " + fmt(grad_phi_ratio) + ", bound = " + fmt(cut.c1 * cut.c1 / r2)});

    const double arg = lambda_sqrt_arg_sup(w.fields, m, a, eps, &mask);
    r.flags.push_back({"Lambda square-root argument >= 0", arg >= 0.0, "sup over B_p(2R) = " + fmt(arg)});
    const double bracket = m * a * a * a_used / (2.0 * (1.0 - eps)) + m * a * a * k / ((1.0 - eps) * (a - 1.0)) +
                           m * m * a * a * a * a * c1_sq / (4.0 * eps * r2 * (1.0 - eps) * (a - 1.0)) +
                           m * a * a / (2.0 * (1.0 - eps)) + std::sqrt(std::max(0.0, arg));

    r.params["m"] = m;
    r.params["alpha"] = a;
    r.params["epsilon"] = eps;
    r.params["R"] = radius;
    r.params["center_x"] = center[0];
    r.params["center_y"] = center[1];
    r.intermediates["K"] = k;
    r.intermediates["C1"] = cut.c1;
    r.intermediates["C2"] = cut.c2;
    r.intermediates["A_const"] = a_paper;
    r.intermediates["A_used"] = a_used;
    r.intermediates["bracket"] = bracket;
    echo_bounds(r, w.bounds);

    Margins mg(r);
    for (const SnapshotFields& s : w.fields) {
        ScalarField lhs(grid, 0.0, s.t), rhs(grid, 0.0, s.t);
        const double singular = m * a * a / (2.0 * s.t * (1.0 - eps));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double wi = s.w[i];
            lhs[i] = s.grad_w_sq[i] / (wi * wi) - a * s.w_t[i] / wi - a * s.q[i] - a * s.nl.g_tilde[i];
            rhs[i] = bracket + singular;
        }
        mg.add_fields(s.t, lhs, rhs, &mask);
    }
    mg.finish(tol, spacing(w));
    return r;
}

HarnackPair harnack_pair(const CheckWindow& w, const EstimateParams& p, double lambda, const Point& x1, double t1,
                         const Point& x2, double t2) {
    const Grid& grid = w.fields.front().w.grid;
    const HarnackData d = harnack_data(w.all, p.alpha);
    return harnack_pair_impl(d, grid, p, resolve_m(p, grid.dim), lambda, x1, t1, x2, t2);
}

CheckReport harnack_bound(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("harnack_bound", w);
    const Grid& grid = w.fields.front().w.grid;
    const double m = resolve_m(p, grid.dim);
    const double k = window_bakry_emery_k(w.fields, m);
    const double arg = lambda_sqrt_arg_sup(w.fields, m, p.alpha, p.epsilon);
    const auto lv = formulas::lambda_alpha_eps(arg, m, p.alpha, p.epsilon, k);
    r.params["m"] = m;
    r.params["alpha"] = p.alpha;
    r.params["epsilon"] = p.epsilon;
    r.text_params["path_policy"] = p.path_policy;
    r.intermediates["K"] = k;
    r.intermediates["Lambda"] = lv.value;
    r.intermediates["Lambda_sqrt_arg_sup"] = arg;
    r.intermediates["prefactor_exponent"] = m * p.alpha / (2.0 * (1.0 - p.epsilon));
    echo_bounds(r, w.bounds);
    r.flags.push_back(lambda_flag(lv, arg));
    r.notes.push_back("prefactor (t2/t1)^{m alpha/(2(1-eps))} follows from integrating the gradient estimate; "
                      "the (t1/t2) form fails for constant solutions");
    r.notes.push_back("the integrand carries G~ = G(w)/w, as produced by the derivation");

    const HarnackData d = harnack_data(w.all, p.alpha);
    std::mt19937_64 rng(p.seed);
    std::vector<std::array<Point, 2>> points;
    std::vector<std::array<double, 2>> times;
    if (p.t1 && p.t2) {
        times.push_back({*p.t1, *p.t2});
        points.push_back({p.x1.value_or(Point{0.0, 0.0}), p.x2.value_or(p.x1.value_or(Point{0.0, 0.0}))});
    } else {
        const auto range = p.t_range.value_or(std::array<double, 2>{w.fields.front().t, w.t_end});
        times = sample_time_pairs(d.w, range[0], range[1], p.pairs, rng);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const Point a = p.x1.value_or(random_node(grid, rng));
            const Point b = p.x2.value_or(random_node(grid, rng));
            points.push_back({a, b});
        }
    }
    r.params["pairs"] = static_cast<double>(times.size());

    Margins mg(r);
    double best_margin = kInf;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const HarnackPair hp =
            harnack_pair_impl(d, grid, p, m, lv.value, points[i][0], times[i][0], points[i][1], times[i][1]);
        mg.add_point(hp.t2, hp.x2, hp.log_ratio, hp.log_bound);
        if (hp.log_bound - hp.log_ratio < best_margin) {
            best_margin = hp.log_bound - hp.log_ratio;
            r.intermediates["worst_pair_ratio"] = std::exp(hp.log_ratio);
            r.intermediates["worst_pair_bound"] = std::exp(hp.log_bound);
            r.intermediates["worst_pair_t1"] = hp.t1;
            r.intermediates["worst_pair_t2"] = hp.t2;
            r.intermediates["worst_pair_straight_integral"] = hp.straight_integral;
            r.intermediates["worst_pair_path_integral"] = hp.path_integral;
        }
    }
    mg.finish(tol, spacing(w));
    return r;
}

CheckReport hamilton_bound(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("hamilton_bound", w);
    const BoundSet& b = w.bounds;
    double sup_w = 0.0;
    const double a = hamilton_ceiling(w, p, sup_w);
    const double k = b.k1;  // infinity Bakry-Emery lower bound
    const double xi = formulas::hamilton_xi(k, b.theta1, b.theta2, b.theta3);
    r.params["A"] = a;
    r.intermediates["xi"] = xi;
    r.intermediates["K_ricf"] = k;
    r.intermediates["sup_w"] = sup_w;
    echo_bounds(r, b);
    add_theta_flags(r, b);

    Margins mg(r);
    const double ae = a / std::numbers::e;
    for (const SnapshotFields& s : w.fields) {
        ScalarField lhs(s.w.grid, 0.0, s.t), rhs(s.w.grid, 0.0, s.t);
        for (std::size_t i = 0; i < s.w.size(); ++i) {
            const double wi = s.w[i];
            const double l = std::log(a / wi);
            lhs[i] = s.grad_w_sq[i] / wi;
            rhs[i] = ae * ((l - 1.0) * (b.theta1 + b.theta2) + l + b.theta4 * b.theta4 / xi) * (1.0 / s.t + xi);
        }
        mg.add_fields(s.t, lhs, rhs);
    }
    mg.finish(tol, spacing(w));
    return r;
}

CheckReport liouville_assess(const CheckWindow& w, const EstimateParams& p, const Tolerances&) {
    CheckReport r = start("liouville_assess", w);
    const BoundSet& b = w.bounds;
    r.params["threshold"] = p.threshold;
    echo_bounds(r, b);
    r.flags.push_back({"theta1 = theta2 = 0", b.theta1 == 0.0 && b.theta2 == 0.0,
                       "theta1 = " + fmt(b.theta1) + ", theta2 = " + fmt(b.theta2)});
    r.flags.push_back({"Ric_f >= 0", b.k1 <= 1e-12, "K1 = " + fmt(b.k1)});

    std::vector<double> grad, osc;
    for (const SnapshotFields& s : w.fields) {
        double g = 0.0;
        for (std::size_t i = 0; i < s.w.size(); ++i) g = std::max(g, s.grad_w_sq[i] / s.w[i]);
        grad.push_back(g);
        osc.push_back(s.w.max() - s.w.min());
        const double lhs = std::max(g, osc.back());
        r.series.push_back({s.t, p.threshold - lhs, lhs, p.threshold});
        r.lhs_sup = std::max(r.lhs_sup, lhs);
    }
    r.rhs_inf = p.threshold;

    // Largest increase over the tail (second half of the window).
    const std::size_t tail = grad.size() / 2;
    double worst_increase = 0.0;
    bool monotone_grad = true, monotone_osc = true;
    for (std::size_t i = tail; i + 1 < grad.size(); ++i) {
        const double dg = grad[i + 1] - grad[i];
        const double dosc = osc[i + 1] - osc[i];
        if (dg > 1e-12 * std::max(grad[i], grad[i + 1])) {
            monotone_grad = false;
            worst_increase = std::max(worst_increase, dg);
        }
        if (dosc > 1e-12 * std::max(osc[i], osc[i + 1])) {
            monotone_osc = false;
            worst_increase = std::max(worst_increase, dosc);
        }
    }
    const double final_lhs = std::max(grad.back(), osc.back());
    r.min_margin = p.threshold - final_lhs;
    if (!(monotone_grad && monotone_osc)) r.min_margin = std::min(r.min_margin, -worst_increase);
    r.argmin_time = w.fields.back().t;
    r.intermediates["sup_grad_sq_over_w_final"] = grad.back();
    r.intermediates["oscillation_final"] = osc.back();
    r.intermediates["tail_monotone_grad"] = monotone_grad ? 1.0 : 0.0;
    r.intermediates["tail_monotone_oscillation"] = monotone_osc ? 1.0 : 0.0;
    r.notes.push_back("thresholded assessment: tolerance is zero, the threshold itself is the allowance");
    r.tolerance = 0.0;
    Margins::assign_verdict(r);
    return r;
}

namespace {

/// Shared body of the pointwise Hessian checks. `extra(s, i)` is the
/// C-independent part of the RHS at node i; the constants come from hess().
CheckReport hessian_like(CheckReport r, const CheckWindow& w, const EstimateParams& p, const Tolerances& tol,
                         std::optional<double> radius, const std::vector<char>* mask, double t_from,
                         const std::function<double(const SnapshotFields&, std::size_t)>& extra) {
    const HessConstants hc = hess_constants(w, p, radius);
    echo_hess(r, p, hc);
    echo_bounds(r, w.bounds);
    const double constant = kSqrt2 * std::sqrt(hc.a) + kSqrt2 * hc.b;

    Margins mg(r);
    double worst = kInf;
    for (const SnapshotFields& s : w.fields) {
        if (s.t < t_from) continue;
        ScalarField lhs(s.w.grid, 0.0, s.t), rhs(s.w.grid, 0.0, s.t);
        for (std::size_t i = 0; i < s.w.size(); ++i) {
            lhs[i] = hessian_norm(s, i) / s.w[i];
            const double e = extra(s, i);
            rhs[i] = e + constant;
            if (!mask || (*mask)[i]) worst = std::min(worst, e - lhs[i]);
        }
        mg.add_fields(s.t, lhs, rhs, mask);
    }
    const EstimateParams pc = p;
    r.intermediates["required_C"] = required_c(worst, [&](double c) {
        EstimateParams q = pc;
        q.c = c;
        const HessConstants h = hess_constants(w, q, radius);
        return kSqrt2 * std::sqrt(h.a) + kSqrt2 * h.b;
    });
    mg.finish(tol, spacing(w));
    return r;
}

}  // namespace

CheckReport hessian_global(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("hessian_global", w);
    const double beta = p.beta;
    return hessian_like(std::move(r), w, p, tol, std::nullopt, nullptr, -kInf,
                        [beta](const SnapshotFields& s, std::size_t i) {
                            return formulas::kHessFactor * beta * s.grad_w_sq[i] / (s.w[i] * s.w[i]);
                        });
}

CheckReport hessian_local(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("hessian_local", w);
    const Grid& grid = w.fields.front().w.grid;
    const double radius = p.radius.value_or(default_radius(grid));
    const Point center = p.center.value_or(default_center(grid));
    std::vector<char> mask(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        mask[i] = geodesic_distance(grid.node(i), center, grid) <= 0.5 * radius ? 1 : 0;
    }
    const double t_from = w.t_end - 0.5 * window_length(w);
    r.params["R"] = radius;
    r.params["center_x"] = center[0];
    r.params["center_y"] = center[1];
    r.intermediates["Q_t_from"] = t_from;
    const double beta = p.beta;
    return hessian_like(std::move(r), w, p, tol, radius, &mask, t_from - 1e-12 * std::abs(w.t_end),
                        [beta](const SnapshotFields& s, std::size_t i) {
                            return formulas::kHessFactor * beta * s.grad_w_sq[i] / (s.w[i] * s.w[i]);
                        });
}

CheckReport ly_hessian(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("ly_hessian", w);
    const double m = resolve_m(p, w.fields.front().w.grid.dim);
    const double k = window_bakry_emery_k(w.fields, m);
    const double arg = lambda_sqrt_arg_sup(w.fields, m, p.alpha, p.epsilon);
    const auto lv = formulas::lambda_alpha_eps(arg, m, p.alpha, p.epsilon, k);
    r.params["m"] = m;
    r.params["alpha"] = p.alpha;
    r.params["epsilon"] = p.epsilon;
    r.intermediates["K"] = k;
    r.intermediates["Lambda"] = lv.value;
    r.intermediates["Lambda_sqrt_arg_sup"] = arg;
    r.flags.push_back(lambda_flag(lv, arg));
    const double a = p.alpha, eps = p.epsilon, beta = p.beta, lambda = lv.value;
    return hessian_like(std::move(r), w, p, tol, std::nullopt, nullptr, -kInf,
                        [=](const SnapshotFields& s, std::size_t i) {
                            const double wi = s.w[i];
                            const double inner = lambda + m * a * a / (2.0 * s.t * (1.0 - eps)) +
                                                 a * (s.w_t[i] / wi + s.q[i] + s.nl.g[i] / wi);
                            return formulas::kHessFactor * beta * inner;
                        });
}

CheckReport hamilton_hessian(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("hamilton_hessian", w);
    const BoundSet& b = w.bounds;
    double sup_w = 0.0;
    const double a = hamilton_ceiling(w, p, sup_w);
    const double eta = formulas::hamilton_eta(b.k1, b.k6, b.k7, b.theta3);
    r.params["A"] = a;
    r.intermediates["eta"] = eta;
    r.intermediates["sup_w"] = sup_w;
    add_theta_flags(r, b);
    const double beta = p.beta;
    const BoundSet bc = b;
    return hessian_like(std::move(r), w, p, tol, std::nullopt, nullptr, -kInf,
                        [=](const SnapshotFields& s, std::size_t i) {
                            const double wi = s.w[i];
                            const double l = std::log(a / wi);
                            const double brace = l + (l - 1.0) * (bc.theta1 + bc.theta2) + bc.k3 * bc.k3 / eta;
                            return formulas::kHessFactor * beta * a / (std::numbers::e * wi) * brace *
                                   (1.0 / s.t + eta);
                        });
}

CheckReport reversed_harnack(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("reversed_harnack", w);
    const Grid& grid = w.fields.front().w.grid;
    const BoundSet& b = w.bounds;
    const double m = resolve_m(p, grid.dim);
    const double k = window_bakry_emery_k(w.fields, m);
    const double arg = lambda_sqrt_arg_sup(w.fields, m, p.alpha, p.epsilon);
    const auto lv = formulas::lambda_alpha_eps(arg, m, p.alpha, p.epsilon, k);
    const HessConstants hc = hess_constants(w, p, p.radius);
    const double n1 = formulas::reversed_n1(b.k6, b.k7, lv.value, hc.a, hc.b, p.beta, p.alpha);
    const double n2 = formulas::reversed_n2(m, p.alpha, p.epsilon, p.beta);

    r.params["m"] = m;
    r.params["alpha"] = p.alpha;
    r.params["epsilon"] = p.epsilon;
    if (p.radius) r.params["R"] = *p.radius;
    echo_hess(r, p, hc);
    echo_bounds(r, b);
    r.intermediates["K"] = k;
    r.intermediates["Lambda"] = lv.value;
    r.intermediates["N1"] = n1;
    r.intermediates["N2"] = n2;
    r.intermediates["denominator"] = 1.0 - formulas::kHessFactor * p.beta * p.alpha;
    r.flags.push_back(lambda_flag(lv, arg));
    r.notes.push_back("checked as log(w(x,t2)/w(x,t1)) <= N1 (t2 - t1) + N2 log(t2/t1), the pairing obtained by "
                      "integrating d/dt log w <= N1 + N2/t; the exponentiated statement attaches the constants the "
                      "other way round");

    const HarnackData d = harnack_data(w.all, p.alpha);
    std::mt19937_64 rng(p.seed);
    std::vector<std::array<double, 2>> times;
    std::vector<Point> xs;
    if (p.t1 && p.t2) {
        times.push_back({*p.t1, *p.t2});
        xs.push_back(p.x1.value_or(Point{0.0, 0.0}));
    } else {
        const auto range = p.t_range.value_or(std::array<double, 2>{w.fields.front().t, w.t_end});
        std::vector<double> ts;
        for (double t : d.w.times) {
            if (t > 0.0 && t >= range[0] - 1e-12 && t <= range[1] + 1e-12) ts.push_back(t);
        }
        if (ts.size() < 2) throw std::invalid_argument("reversed_harnack: fewer than two snapshots in the time range");
        std::uniform_int_distribution<std::size_t> pick(0, ts.size() - 1);
        for (int i = 0; i < p.pairs; ++i) {
            std::size_t a = pick(rng), c = pick(rng);
            while (c == a) c = pick(rng);
            if (a > c) std::swap(a, c);
            times.push_back({ts[a], ts[c]});
            xs.push_back(p.x1.value_or(random_node(grid, rng)));
        }
    }
    r.params["pairs"] = static_cast<double>(times.size());

    Margins mg(r);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Point x = grid.node(grid.nearest_node(xs[i]));
        const double t1 = times[i][0], t2 = times[i][1];
        if (!(t1 > 0.0 && t2 > t1)) throw std::invalid_argument("reversed_harnack: 0 < t1 < t2 required");
        const double lhs = std::log(d.w(x, t2)) - std::log(d.w(x, t1));
        const double rhs = n1 * (t2 - t1) + n2 * std::log(t2 / t1);
        mg.add_point(t2, x, lhs, rhs);
    }
    mg.finish(tol, spacing(w));
    return r;
}

namespace {

struct CdFields {
    ScalarField lhs, rhs;
    double k = 0.0;
    double k_bakry_emery = 0.0;
    double eig_min = 0.0;
};

CdFields cd_fields(const ScalarField& u, const ScalarField& f, double m, std::optional<double> k) {
    require_same_grid(u.grid, f.grid, "cd_condition");
    const CurvatureData cd = bakry_emery(f, BakryEmeryVariant::finite(m));
    CdFields out;
    out.k_bakry_emery = cd.k;
    out.k = k.value_or(-cd.k);

    const VectorField grad_f = gradient(f);
    const VectorField grad_u = gradient(u);
    const ScalarField grad_sq = norm_squared(grad_u);
    const ScalarField lf_u = weighted_laplacian(u, grad_f);
    const ScalarField lf_grad_sq = weighted_laplacian(grad_sq, grad_f);
    const ScalarField grad_dot = dot(grad_u, gradient(lf_u));

    out.lhs = ScalarField(u.grid, 0.0, u.time);
    out.rhs = out.lhs;
    out.eig_min = kInf;
    for (std::size_t i = 0; i < u.size(); ++i) {
        out.lhs[i] = lf_u[i] * lf_u[i] / m + out.k * grad_sq[i];
        out.rhs[i] = 0.5 * lf_grad_sq[i] - grad_dot[i];
        out.eig_min = std::min(out.eig_min, cd.ricci_f_mn.min_eigenvalue(i));
    }
    return out;
}

}  // namespace

CheckReport cd_condition_field(const ScalarField& u, const ScalarField& f, double m, std::optional<double> k,
                               const Tolerances& tol) {
    CheckReport r;
    r.name = "cd_condition";
    const CdFields cd = cd_fields(u, f, m, k);
    r.params["m"] = m;
    r.params["K"] = cd.k;
    r.intermediates["K_bakry_emery"] = cd.k_bakry_emery;
    Margins mg(r);
    mg.add_fields(u.time, cd.lhs, cd.rhs);
    r.flags.push_back({"Ric_f^{m-n} >= K g", cd.eig_min >= cd.k - tol.tau_abs,
                       "min eigenvalue = " + fmt(cd.eig_min) + ", K = " + fmt(cd.k)});
    mg.finish(tol, u.grid.max_spacing());
    return r;
}

CheckReport cd_condition(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    CheckReport r = start("cd_condition", w);
    const double m = resolve_m(p, w.fields.front().w.grid.dim);
    r.params["m"] = m;
    Margins mg(r);
    bool curvature_ok = true;
    std::string witness;
    for (const SnapshotFields& s : w.fields) {
        const CdFields cd = cd_fields(s.w, s.f, m, p.k);
        r.params["K"] = cd.k;
        mg.add_fields(s.t, cd.lhs, cd.rhs);
        if (curvature_ok && cd.eig_min < cd.k - tol.tau_abs) {
            curvature_ok = false;
            witness = "min eigenvalue = " + fmt(cd.eig_min) + ", K = " + fmt(cd.k) + " at t = " + fmt(s.t);
        }
    }
    r.flags.push_back({"Ric_f^{m-n} >= K g", curvature_ok, witness});
    mg.finish(tol, spacing(w));
    return r;
}

CheckReport run_check(const std::string& name, const CheckWindow& w, const EstimateParams& p, const Tolerances& tol) {
    if (name == "li_yau_compact") return li_yau_compact(w, p, tol);
    if (name == "li_yau_global") return li_yau_global(w, p, tol);
    if (name == "li_yau_local") return li_yau_local(w, p, tol);
    if (name == "harnack_bound") return harnack_bound(w, p, tol);
    if (name == "hamilton_bound") return hamilton_bound(w, p, tol);
    if (name == "liouville_assess") return liouville_assess(w, p, tol);
    if (name == "hessian_global") return hessian_global(w, p, tol);
    if (name == "hessian_local") return hessian_local(w, p, tol);
    if (name == "ly_hessian") return ly_hessian(w, p, tol);
    if (name == "reversed_harnack") return reversed_harnack(w, p, tol);
    if (name == "hamilton_hessian") return hamilton_hessian(w, p, tol);
    if (name == "cd_condition") return cd_condition(w, p, tol);
    throw std::invalid_argument("unknown check '" + name + "'");
}

}  // namespace harnack
