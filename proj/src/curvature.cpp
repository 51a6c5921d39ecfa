#include "harnack/curvature.hpp"

#include "harnack/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace harnack {

double tensor_lower_bound(const SymTensorField& t) {
    const std::size_t n = t.grid.size();
    double k = 0.0;
    for (std::size_t i = 0; i < n; ++i) k = std::max(k, -t.min_eigenvalue(i));
    return k;
}

CurvatureData bakry_emery(const ScalarField& f, BakryEmeryVariant variant) {
    const Grid& g = f.grid;
    const double n = g.dim;
    CurvatureData out;
    out.variant = variant;
    out.ricci_f = hessian(f);
    out.ricci_f_mn = out.ricci_f;

    if (variant.is_finite()) {
        const double m = *variant.m;
        if (m < n) {
            throw std::invalid_argument("Bakry-Emery tensor needs m >= n (m = " + std::to_string(m) +
                                        ", n = " + std::to_string(g.dim) + ")");
        }
        const VectorField df = gradient(f);
        bool flat_weight = true;
        for (double v : df.values) {
            if (v != 0.0) {
                flat_weight = false;
                break;
            }
        }
        if (m == n && !flat_weight) {
            throw std::invalid_argument("m = n requires a constant weight f");
        }
        if (m > n) {
            const double inv = 1.0 / (m - n);
            for (std::size_t k = 0; k < g.size(); ++k) {
                for (int a = 0; a < g.dim; ++a) {
                    for (int b = a; b < g.dim; ++b) out.ricci_f_mn(k, a, b) -= df(k, a) * df(k, b) * inv;
                }
            }
        }
    }

    out.k = tensor_lower_bound(out.ricci_f_mn);
    out.k1 = tensor_lower_bound(out.ricci_f);
    out.k2 = 0.0;
    return out;
}

namespace {

struct BochnerTerms {
    ScalarField half_lf_grad_sq;  // 1/2 L_f |grad u|^2
    ScalarField grad_dot;         // <grad L_f u, grad u>
    ScalarField lf_u;
    ScalarField grad_sq;
    SymTensorField hess_u;
    VectorField grad_u;
    VectorField grad_f;
};

BochnerTerms bochner_terms(const ScalarField& u, const ScalarField& f) {
    require_same_grid(u.grid, f.grid, "bochner_residual");
    BochnerTerms t;
    t.grad_f = gradient(f);
    t.grad_u = gradient(u);
    t.hess_u = hessian(u);
    t.grad_sq = norm_squared(t.grad_u);
    t.half_lf_grad_sq = weighted_laplacian(t.grad_sq, t.grad_f);
    for (double& v : t.half_lf_grad_sq.values) v *= 0.5;
    t.lf_u = weighted_laplacian(u, t.grad_f);
    t.grad_dot = dot(gradient(t.lf_u), t.grad_u);
    return t;
}

}  // namespace

ScalarField bochner_residual(const ScalarField& u, const ScalarField& f, BochnerIdentity) {
    const BochnerTerms t = bochner_terms(u, f);
    const SymTensorField hess_f = hessian(f);
    ScalarField out(u.grid, 0.0, u.time);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = t.half_lf_grad_sq[k] - t.hess_u.frobenius_squared(k) - t.grad_dot[k] -
                 hess_f.quadratic_form(k, t.grad_u);
    }
    return out;
}

ScalarField bochner_residual(const ScalarField& u, const ScalarField& f, BochnerInequality params) {
    if (!(params.m > 0.0)) throw std::invalid_argument("bochner_residual: m must be positive");
    const BochnerTerms t = bochner_terms(u, f);
    ScalarField out(u.grid, 0.0, u.time);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double lf = t.lf_u[k];
        out[k] = t.half_lf_grad_sq[k] - t.grad_dot[k] - lf * lf / params.m - params.k * t.grad_sq[k];
    }
    return out;
}

}  // namespace harnack
