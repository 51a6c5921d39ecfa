#pragma once

#include "harnack/grid.hpp"

#include <optional>

namespace harnack {

/// Which Bakry-Emery tensor a lower bound refers to. `m` is the synthetic
/// dimension of the finite variant; nullopt selects the infinity variant.
struct BakryEmeryVariant {
    std::optional<double> m;

    static BakryEmeryVariant finite(double m) { return {m}; }
    static BakryEmeryVariant infinity() { return {std::nullopt}; }
    bool is_finite() const { return m.has_value(); }
};

/// Curvature of the weighted flat torus (M, g, e^{-f} dx). Ric and Rm vanish,
/// so every curvature term comes from f.
struct CurvatureData {
    SymTensorField ricci_f;     // Hess f
    SymTensorField ricci_f_mn;  // Hess f - df (x) df / (m - n); equals ricci_f for the infinity variant
    BakryEmeryVariant variant;
    double k = 0.0;   // Ric of the requested variant >= -k g
    double k1 = 0.0;  // Ric_f >= -k1 g, |Rm| = 0 <= k1
    double k2 = 0.0;  // |grad Rm| = 0 on flat tori
};

/// max(0, sup_x -lambda_min(T(x))).
double tensor_lower_bound(const SymTensorField& t);

/// The finite variant requires m > n, or m == n with f constant (the correction
/// term then vanishes identically).
CurvatureData bakry_emery(const ScalarField& f, BakryEmeryVariant variant);

struct BochnerIdentity {};
/// Curvature-dimension form: residual of
///   1/2 L_f |grad u|^2 - <grad u, grad L_f u> >= (1/m)(L_f u)^2 + K |grad u|^2.
struct BochnerInequality {
    double m;
    double k;  // lower bound Ric_f^{m-n} >= k g (may be negative)
};

/// Identity: 1/2 L_f|grad u|^2 - |Hess u|^2 - <grad L_f u, grad u> - Ric_f(grad u, grad u),
/// which vanishes in the continuum.
ScalarField bochner_residual(const ScalarField& u, const ScalarField& f, BochnerIdentity);

/// Inequality: 1/2 L_f|grad u|^2 - <grad u, grad L_f u> - (1/m)(L_f u)^2 - k |grad u|^2,
/// nonnegative in the continuum whenever Ric_f^{m-n} >= k g.
ScalarField bochner_residual(const ScalarField& u, const ScalarField& f, BochnerInequality params);

}  // namespace harnack
