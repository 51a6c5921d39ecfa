#pragma once

#include "harnack/model.hpp"
#include "harnack/solver.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace harnack {

/// tol = tau_abs + tau_disc h^2 (1 + sup|LHS| + sup|RHS|).
struct Tolerances {
    double tau_abs = 1e-9;
    double tau_disc = 10.0;
};

double tolerance(const Tolerances& tol, double h, double lhs_sup_abs, double rhs_sup_abs);

struct Flag {
    std::string name;
    bool holds = true;
    std::string witness;
};

enum class Verdict { pass, pass_with_flags, fail };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// Per-snapshot (or per-pair) extrema.
struct SeriesPoint {
    double t = 0.0;
    double min_margin = 0.0;
    double lhs_sup = 0.0;
    double rhs_inf = 0.0;
};

struct CheckReport {
    std::string name;
    std::string label;
    std::map<std::string, double> params;
    std::map<std::string, std::string> text_params;

    double min_margin = std::numeric_limits<double>::infinity();
    Point argmin_location{0.0, 0.0};
    double argmin_time = 0.0;
    double lhs_sup = -std::numeric_limits<double>::infinity();
    double rhs_inf = std::numeric_limits<double>::infinity();

    std::vector<Flag> flags;
    std::vector<std::string> notes;
    double tolerance = 0.0;
    Verdict verdict = Verdict::pass;
    std::map<std::string, double> intermediates;
    std::vector<SeriesPoint> series;
};

/// Parameters shared by the checkers; each checker reads the ones it needs.
struct EstimateParams {
    double m = 0.0;  // synthetic dimension; 0 selects the manifold dimension
    double alpha = 2.0;
    double epsilon = 0.5;
    double beta = 1.0;
    double delta = 0.5;
    double c = 1.0;  // free constant of the Hessian estimates
    std::optional<double> radius;
    std::optional<Point> center;
    std::optional<double> a_ceiling;  // A of the Hamilton estimates
    std::optional<double> t_min;
    std::optional<double> k;  // K of cd_condition (Ric_f^{m-n} >= K g); default from the weight

    // Harnack-type checks
    std::string path_policy = "straight";  // or "sampled"
    int pairs = 10;
    std::uint64_t seed = 1;
    std::optional<std::array<double, 2>> t_range;
    std::optional<Point> x1, x2;
    std::optional<double> t1, t2;

    double threshold = 1e-8;  // liouville_assess
};

/// Every parameter inequality of the named check, as printed counterexamples.
/// `dim` is the manifold dimension, `t_end` the run length.
std::vector<std::string> validate_params(const std::string& check, const EstimateParams& p, int dim, double t_end,
                                         double min_length);

/// Names accepted by run_check.
const std::vector<std::string>& check_names();
bool is_trajectory_check(const std::string& name);

/// Snapshots a check is evaluated on, with the bounds sampled over them.
struct CheckWindow {
    const Model* model = nullptr;
    std::span<const SnapshotFields> fields;  // t >= t_min
    std::span<const SnapshotFields> all;     // full trajectory
    BoundSet bounds;
    double t_end = 0.0;
};

CheckWindow make_window(const Model& model, std::span<const SnapshotFields> all, double t_min);

// Closed-form constants. Each is monotone non-decreasing in every theta / K input.
namespace formulas {

inline constexpr double kHessFactor = 4.65685424949238;  // 4 sqrt(2) - 1

struct LambdaValue {
    double value = 0.0;
    bool clamped = false;
};
/// sqrt(max(0, arg)) + m a^2 K / ((1 - eps)(a - 1)) + m a^2 / (2 (1 - eps)), where arg is the
/// windowed supremum of m a^3 (L_f q + L_f G~) / (2 (1 - eps)) + a^2 (a - 1) m (|grad q|^2 + |grad G~|^2) / (1 - eps).
LambdaValue lambda_alpha_eps(double arg_sup, double m, double alpha, double eps, double k);

/// xi = 2K + theta1 + theta2 + theta3 + 1.
double hamilton_xi(double k, double theta1, double theta2, double theta3);
/// eta = 2K1 + K6 + K7 + theta3 + 1.
double hamilton_eta(double k1, double k6, double k7, double theta3);
/// A = ((m - 1) C1 (1 + R sqrt(K)) + C2 + 2 C1^2) / R^2.
double local_a_const(double m, double c1, double c2, double r, double k);
/// max{2K6 + C K1 + K7, 2K1 + 4K6 + 4K8}.
double hess_lambda(double c, double k1, double k6, double k7, double k8);
/// 2K3 + C K2 + 2 beta K3.
double hess_omega(double c, double k2, double k3, double beta);
/// Omega/(delta beta^2) + (K4 + K5)/(delta beta) + C/(delta^2 beta^2 T^2), plus the
/// local terms C/(delta^4 beta^6 R^4) + C/(delta^2 beta^2)(1/R^4 + K1/R^2) when R is given.
double hess_a(double omega, double k4, double k5, double c, double delta, double beta, double t_len,
              std::optional<double> r = std::nullopt, double k1 = 0.0);
/// (Omega + Lambda)/(delta beta) + 2 C^2/(delta beta T^2).
double hess_b(double omega, double lambda_h, double c, double delta, double beta, double t_len);
/// (K6 + K7 + (4 sqrt2 - 1) beta Lambda + sqrt2 A^{1/2} + sqrt2 B) / (1 - (4 sqrt2 - 1) beta alpha).
double reversed_n1(double k6, double k7, double lambda, double a, double b, double beta, double alpha);
/// (4 sqrt2 - 1) beta m alpha^2 / (2 (1 - eps)(1 - (4 sqrt2 - 1) beta alpha)).
double reversed_n2(double m, double alpha, double eps, double beta);

}  // namespace formulas

/// Windowed supremum of the square-root argument of Lambda_{alpha,eps}; nodes
/// with mask[k] == 0 are skipped when a mask is given.
double lambda_sqrt_arg_sup(std::span<const SnapshotFields> fields, double m, double alpha, double eps,
                           const std::vector<char>* mask = nullptr);

/// Lower bound K of Ric_f^{m-n} >= -K g over the window (infinity variant for m = inf).
double window_bakry_emery_k(std::span<const SnapshotFields> fields, double m);

// Checkers. Each returns a finished report (verdict assigned).
CheckReport li_yau_compact(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport li_yau_global(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport li_yau_local(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport harnack_bound(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport hamilton_bound(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport liouville_assess(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport hessian_global(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport hessian_local(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport ly_hessian(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport reversed_harnack(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport hamilton_hessian(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);
CheckReport cd_condition(const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);

/// Residual check of 1/2 L_f|grad u|^2 - <grad u, grad L_f u> >= (1/m)(L_f u)^2 + K |grad u|^2
/// on a single field. K defaults to -(Bakry-Emery lower bound of f for this m).
CheckReport cd_condition_field(const ScalarField& u, const ScalarField& f, double m, std::optional<double> k,
                               const Tolerances& tol);

/// Dispatch by name.
CheckReport run_check(const std::string& name, const CheckWindow& w, const EstimateParams& p, const Tolerances& tol);

/// log(w(x1,t1) / w(x2,t2)) and its bound for one pair, exposed for tests.
struct HarnackPair {
    Point x1, x2;
    double t1, t2;
    double log_ratio;
    double log_bound;  // (m a / (2(1 - eps))) log(t2/t1) + inf over paths of the integral
    double straight_integral;
    double path_integral;  // minimum over the policy's paths
};
HarnackPair harnack_pair(const CheckWindow& w, const EstimateParams& p, double lambda, const Point& x1, double t1,
                         const Point& x2, double t2);

}  // namespace harnack
