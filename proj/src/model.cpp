#include "harnack/model.hpp"

#include "harnack/curvature.hpp"
#include "harnack/operators.hpp"

#include <algorithm>
#include <cmath>

namespace harnack {

namespace {

ScalarField sample_expression(const Grid& grid, const Expression& e, double t) {
    ScalarField out(grid, 0.0, t);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Point p = grid.node(k);
        out[k] = e.evaluate(p[0], p[1], t);
    }
    if (!out.all_finite()) {
        throw std::invalid_argument("expression '" + e.source() + "' is not finite on the grid at t = " +
                                    std::to_string(t));
    }
    return out;
}

const Expression& source_expression(const Nonlinearity& nl) {
    return std::get<nl::CaffarelliLin>(nl).source;
}

struct Derivatives {
    VectorField grad_w;
    SymTensorField hess_w;
    ScalarField lf_w;
    ScalarField grad_w_sq;
};

Derivatives derivatives(const ScalarField& w, const VectorField& grad_f) {
    Derivatives d;
    d.grad_w = gradient(w);
    d.hess_w = hessian(w);
    d.lf_w = weighted_laplacian(w, grad_f);
    d.grad_w_sq = norm_squared(d.grad_w);
    return d;
}

NonlinearFields nonlinear_impl(const Nonlinearity& nl, const ScalarField& w, const Derivatives& d,
                               const VectorField& grad_f, const ScalarField* source) {
    const Grid& grid = w.grid;
    const int dim = grid.dim;
    const bool caffarelli = std::holds_alternative<nl::CaffarelliLin>(nl);
    if (caffarelli && source == nullptr) {
        throw std::invalid_argument("caffarelli_lin needs the source field A");
    }

    NonlinearFields out;
    out.g = ScalarField(grid, 0.0, w.time);
    out.dg = out.g;
    out.d2g = out.g;
    out.g_tilde = out.g;
    out.lf_g_tilde = out.g;
    out.grad_g_tilde = VectorField(grid, w.time);
    out.grad_g = VectorField(grid, w.time);
    out.hess_g = SymTensorField(grid, w.time);

    VectorField grad_a;
    SymTensorField hess_a;
    ScalarField lf_a;
    if (caffarelli) {
        out.lambda = caffarelli_lin_lambda(w, *source);
        grad_a = gradient(*source);
        hess_a = hessian(*source);
        lf_a = weighted_laplacian(*source, grad_f);
    }

    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double wk = w[k];
        if (!(wk > 0.0)) {
            throw DomainError("nonpositive w = " + std::to_string(wk) + " at node " + std::to_string(k));
        }
        const SourceTerms s{out.lambda, caffarelli ? (*source)[k] : 0.0};
        const GJet j = g_jet(nl, wk, s);
        const double gt1 = j.dg / wk - j.g / (wk * wk);
        const double gt2 = j.d2g / wk - 2.0 * j.dg / (wk * wk) + 2.0 * j.g / (wk * wk * wk);

        out.g[k] = j.g;
        out.dg[k] = j.dg;
        out.d2g[k] = j.d2g;
        out.g_tilde[k] = j.g / wk;
        out.lf_g_tilde[k] = gt1 * d.lf_w[k] + gt2 * d.grad_w_sq[k];
        for (int a = 0; a < dim; ++a) {
            out.grad_g_tilde(k, a) = gt1 * d.grad_w(k, a);
            out.grad_g(k, a) = j.dg * d.grad_w(k, a);
            for (int b = a; b < dim; ++b) {
                out.hess_g(k, a, b) = j.d2g * d.grad_w(k, a) * d.grad_w(k, b) + j.dg * d.hess_w(k, a, b);
            }
        }
        if (caffarelli) {
            // G~ = lambda + A / w carries explicit x dependence through A.
            double cross = 0.0;
            for (int a = 0; a < dim; ++a) cross += grad_a(k, a) * d.grad_w(k, a);
            out.lf_g_tilde[k] += lf_a[k] / wk - 2.0 * cross / (wk * wk);
            for (int a = 0; a < dim; ++a) {
                out.grad_g_tilde(k, a) += grad_a(k, a) / wk;
                out.grad_g(k, a) += grad_a(k, a);
                for (int b = a; b < dim; ++b) out.hess_g(k, a, b) += hess_a(k, a, b);
            }
        }
    }
    return out;
}

}  // namespace

Model::Model(Grid grid, WeightSpec weight, PotentialSpec potential, Nonlinearity nl)
    : grid_(std::move(grid)), weight_(std::move(weight)), potential_(std::move(potential)), nl_(std::move(nl)) {
    validate(nl_);
    const bool dynamic = weight_.f.depends_on_time() || potential_.q.depends_on_time() ||
                         (has_source() && source_expression(nl_).depends_on_time());
    if (!dynamic) static_ = build(0.0);
}

std::shared_ptr<Coefficients> Model::build(double t) const {
    auto c = std::make_shared<Coefficients>();
    c->time = t;
    c->f = sample_expression(grid_, weight_.f, t);
    c->grad_f = gradient(c->f);
    c->q = sample_expression(grid_, potential_.q, t);
    c->source = has_source() ? sample_expression(grid_, source_expression(nl_), t) : ScalarField(grid_, 0.0, t);
    return c;
}

std::shared_ptr<const Coefficients> Model::coefficients(double t) const {
    if (static_) return static_;
    return build(t);
}

double caffarelli_lin_lambda(const ScalarField& w, const ScalarField& source) {
    require_same_grid(w.grid, source.grid, "caffarelli_lin_lambda");
    const ScalarField lap = laplacian(w);
    double sum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) sum += w[k] * lap[k] + w[k] * source[k];
    return -sum * w.grid.cell_volume();
}

NonlinearFields nonlinear_fields(const Nonlinearity& nl, const ScalarField& w, const VectorField& grad_f,
                                 const ScalarField* source) {
    return nonlinear_impl(nl, w, derivatives(w, grad_f), grad_f, source);
}

VectorField g_tilde_gradient_field(const Nonlinearity& nl, const ScalarField& w, const ScalarField* source) {
    const VectorField zero(w.grid, w.time);
    return nonlinear_fields(nl, w, zero, source).grad_g_tilde;
}

ScalarField g_tilde_weighted_laplacian_field(const Nonlinearity& nl, const ScalarField& w, const ScalarField& f,
                                             const ScalarField* source) {
    require_same_grid(w.grid, f.grid, "g_tilde_weighted_laplacian_field");
    return nonlinear_fields(nl, w, gradient(f), source).lf_g_tilde;
}

SnapshotFields evaluate_fields(const Model& model, const ScalarField& w, const ScalarField& w_t) {
    require_same_grid(model.grid(), w.grid, "evaluate_fields");
    const auto coeffs = model.coefficients(w.time);

    SnapshotFields s;
    s.t = w.time;
    s.w = w;
    s.w_t = w_t;
    Derivatives d = derivatives(w, coeffs->grad_f);

    s.f = coeffs->f;
    s.grad_f = coeffs->grad_f;
    s.hess_f = hessian(s.f);
    s.k_ricf = tensor_lower_bound(s.hess_f);

    s.q = coeffs->q;
    s.grad_q = gradient(s.q);
    s.hess_q = hessian(s.q);
    s.lf_q = weighted_laplacian(s.q, s.grad_f);

    s.nl = nonlinear_impl(model.nonlinearity(), w, d, s.grad_f, model.has_source() ? &coeffs->source : nullptr);

    s.grad_w = std::move(d.grad_w);
    s.hess_w = std::move(d.hess_w);
    s.lf_w = std::move(d.lf_w);
    s.grad_w_sq = std::move(d.grad_w_sq);
    return s;
}

BoundSet sample_bounds(std::span<const SnapshotFields> window, const Nonlinearity& nl) {
    if (window.empty()) throw std::invalid_argument("sample_bounds: empty window");
    BoundSet b;
    b.t_start = window.front().t;
    b.t_end = window.back().t;
    for (const SnapshotFields& s : window) {
        b.k1 = std::max(b.k1, s.k_ricf);
        for (std::size_t k = 0; k < s.w.size(); ++k) {
            const double w = s.w[k];
            if (!(w > 0.0)) throw DomainError("sample_bounds: nonpositive w at t = " + std::to_string(s.t));
            b.theta1 = std::max(b.theta1, std::abs(s.q[k]));
            b.theta2 = std::max(b.theta2, std::abs(s.nl.g[k]) / w);
            b.theta3 = std::max(b.theta3, std::abs(s.nl.dg[k]));
            b.theta4 = std::max(b.theta4, std::sqrt(s.grad_q.norm_squared(k)));
            b.k4 = std::max(b.k4, std::sqrt(s.hess_q.frobenius_squared(k)));
            b.k5 = std::max(b.k5, std::sqrt(s.nl.hess_g.frobenius_squared(k)) / w);
            b.k8 = std::max(b.k8, std::sqrt(s.nl.grad_g.norm_squared(k)) / w);
        }
    }
    for (const char* key : {"theta1", "theta2", "theta3", "theta4", "K1", "K3", "K4", "K5", "K6", "K7", "K8"}) {
        b.provenance[key] = "sampled";
    }
    b.provenance["K2"] = "flat torus";
    if (const auto ab = analytic_bounds(nl)) {
        b.theta2 = ab->g_over_w;
        b.theta3 = ab->g_prime;
        b.provenance["theta2"] = "analytic";
        b.provenance["theta3"] = "analytic";
        b.provenance["K7"] = "analytic";
    }
    b.k2 = 0.0;
    b.k3 = b.theta4;
    b.k6 = b.theta1;
    b.k7 = b.theta2;
    return b;
}

}  // namespace harnack
