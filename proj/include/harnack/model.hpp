#pragma once

#include "harnack/expression.hpp"
#include "harnack/grid.hpp"
#include "harnack/nonlinearity.hpp"

#include <map>
#include <memory>
#include <span>
#include <string>

namespace harnack {

/// Weight f(x, y, t) of the measure e^{-f} dx.
struct WeightSpec {
    Expression f;
};

/// Potential q(x, y, t).
struct PotentialSpec {
    Expression q;
};

/// Sampled coefficients of the equation at one time.
struct Coefficients {
    double time = 0.0;
    ScalarField f;
    VectorField grad_f;
    ScalarField q;
    ScalarField source;  // A(x, t) of the Caffarelli-Lin case, zero otherwise
};

/// The equation (L_f - q - d/dt) w = G(w) on a flat torus grid.
class Model {
public:
    Model(Grid grid, WeightSpec weight, PotentialSpec potential, Nonlinearity nl);

    const Grid& grid() const { return grid_; }
    const WeightSpec& weight() const { return weight_; }
    const PotentialSpec& potential() const { return potential_; }
    const Nonlinearity& nonlinearity() const { return nl_; }

    bool has_source() const { return std::holds_alternative<nl::CaffarelliLin>(nl_); }

    /// Shared, precomputed once for time-independent coefficients.
    std::shared_ptr<const Coefficients> coefficients(double t) const;

private:
    std::shared_ptr<Coefficients> build(double t) const;

    Grid grid_;
    WeightSpec weight_;
    PotentialSpec potential_;
    Nonlinearity nl_;
    std::shared_ptr<const Coefficients> static_;
};

/// lambda(t) = -sum_k (w Lap w + w A)_k h^d (unweighted volume element).
double caffarelli_lin_lambda(const ScalarField& w, const ScalarField& source);

/// G(w) and its chain-rule derivatives as fields.
struct NonlinearFields {
    double lambda = 0.0;
    ScalarField g, dg, d2g;    // G(w), G'(w), G''(w)
    ScalarField g_tilde;       // G(w) / w
    VectorField grad_g_tilde;  // grad G~
    ScalarField lf_g_tilde;    // L_f G~
    VectorField grad_g;        // grad G(w)
    SymTensorField hess_g;     // Hess G(w)
};

/// `source` is required for the Caffarelli-Lin case (A and its derivatives
/// enter through the explicit x dependence of G) and ignored otherwise.
NonlinearFields nonlinear_fields(const Nonlinearity& nl, const ScalarField& w, const VectorField& grad_f,
                                 const ScalarField* source = nullptr);

/// grad G~ = (dG~/dw) grad w (plus grad A / w for Caffarelli-Lin).
VectorField g_tilde_gradient_field(const Nonlinearity& nl, const ScalarField& w, const ScalarField* source = nullptr);

/// L_f G~ = (dG~/dw) L_f w + (d^2G~/dw^2) |grad w|^2 (plus the A terms for Caffarelli-Lin).
ScalarField g_tilde_weighted_laplacian_field(const Nonlinearity& nl, const ScalarField& w, const ScalarField& f,
                                             const ScalarField* source = nullptr);

/// Every field a checker may need at one snapshot.
struct SnapshotFields {
    double t = 0.0;
    ScalarField w, w_t;
    VectorField grad_w;
    SymTensorField hess_w;
    ScalarField lf_w;
    ScalarField grad_w_sq;  // |grad w|^2

    ScalarField f;
    VectorField grad_f;
    SymTensorField hess_f;
    double k_ricf = 0.0;  // Ric_f >= -k_ricf g at this time

    ScalarField q;
    VectorField grad_q;
    SymTensorField hess_q;
    ScalarField lf_q;

    NonlinearFields nl;
};

SnapshotFields evaluate_fields(const Model& model, const ScalarField& w, const ScalarField& w_t);

/// theta_1..theta_4 and K_1..K_8 over a window of snapshots.
struct BoundSet {
    double theta1 = 0.0;  // |q|
    double theta2 = 0.0;  // |G| / w
    double theta3 = 0.0;  // |G'(w)|
    double theta4 = 0.0;  // |grad q|
    double k1 = 0.0;      // Ric_f >= -K1, |Rm| = 0 <= K1
    double k2 = 0.0;      // |grad Rm| = 0
    double k3 = 0.0;      // |grad q|
    double k4 = 0.0;      // |Hess q|
    double k5 = 0.0;      // |Hess G(w)| / w
    double k6 = 0.0;      // |q|
    double k7 = 0.0;      // |G| / w
    double k8 = 0.0;      // |grad G(w)| / w
    double t_start = 0.0;
    double t_end = 0.0;
    std::map<std::string, std::string> provenance;  // "sampled" or "analytic"
};

/// Suprema over every node of every snapshot in the window. Closed forms
/// replace theta2 = K7 and theta3 where the nonlinearity has them.
BoundSet sample_bounds(std::span<const SnapshotFields> window, const Nonlinearity& nl);

}  // namespace harnack
