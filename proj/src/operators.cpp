#include "harnack/operators.hpp"

namespace harnack {

VectorField gradient(const ScalarField& u) {
    const Grid& g = u.grid;
    VectorField out(g, u.time);
    const int n0 = g.counts[0];
    const int n1 = g.counts[1];
    const double inv0 = 1.0 / (2.0 * g.spacing[0]);
    const double inv1 = 1.0 / (2.0 * g.spacing[1]);
    for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < n0; ++i) {
            const std::size_t k = g.index(i, j);
            out(k, 0) = (u[g.index(i + 1, j)] - u[g.index(i - 1, j)]) * inv0;
            if (g.dim == 2) out(k, 1) = (u[g.index(i, j + 1)] - u[g.index(i, j - 1)]) * inv1;
        }
    }
    return out;
}

SymTensorField hessian(const ScalarField& u) {
    const Grid& g = u.grid;
    SymTensorField out(g, u.time);
    const int n0 = g.counts[0];
    const int n1 = g.counts[1];
    const double inv00 = 1.0 / (g.spacing[0] * g.spacing[0]);
    const double inv11 = 1.0 / (g.spacing[1] * g.spacing[1]);
    const double inv01 = 1.0 / (4.0 * g.spacing[0] * g.spacing[1]);
    for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < n0; ++i) {
            const std::size_t k = g.index(i, j);
            const double c = u[k];
            out(k, 0, 0) = (u[g.index(i + 1, j)] - 2.0 * c + u[g.index(i - 1, j)]) * inv00;
            if (g.dim == 2) {
                out(k, 1, 1) = (u[g.index(i, j + 1)] - 2.0 * c + u[g.index(i, j - 1)]) * inv11;
                out(k, 0, 1) = (u[g.index(i + 1, j + 1)] - u[g.index(i + 1, j - 1)] - u[g.index(i - 1, j + 1)] +
                                u[g.index(i - 1, j - 1)]) *
                               inv01;
            }
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& u) {
    const Grid& g = u.grid;
    ScalarField out(g, 0.0, u.time);
    const int n0 = g.counts[0];
    const int n1 = g.counts[1];
    const double inv00 = 1.0 / (g.spacing[0] * g.spacing[0]);
    const double inv11 = 1.0 / (g.spacing[1] * g.spacing[1]);
    for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < n0; ++i) {
            const std::size_t k = g.index(i, j);
            const double c = u[k];
            double v = (u[g.index(i + 1, j)] - 2.0 * c + u[g.index(i - 1, j)]) * inv00;
            if (g.dim == 2) v += (u[g.index(i, j + 1)] - 2.0 * c + u[g.index(i, j - 1)]) * inv11;
            out[k] = v;
        }
    }
    return out;
}

ScalarField weighted_laplacian(const ScalarField& u, const VectorField& grad_f) {
    require_same_grid(u.grid, grad_f.grid, "weighted_laplacian");
    ScalarField out = laplacian(u);
    const VectorField grad_u = gradient(u);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double drift = 0.0;
        for (int a = 0; a < u.grid.dim; ++a) drift += grad_f(k, a) * grad_u(k, a);
        out[k] -= drift;
    }
    return out;
}

ScalarField weighted_laplacian(const ScalarField& u, const ScalarField& f) {
    require_same_grid(u.grid, f.grid, "weighted_laplacian");
    return weighted_laplacian(u, gradient(f));
}

ScalarField dot(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid, "dot");
    ScalarField out(a.grid, 0.0, a.time);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double s = 0.0;
        for (int axis = 0; axis < a.grid.dim; ++axis) s += a(k, axis) * b(k, axis);
        out[k] = s;
    }
    return out;
}

ScalarField norm_squared(const VectorField& v) {
    ScalarField out(v.grid, 0.0, v.time);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = v.norm_squared(k);
    return out;
}

ScalarField frobenius_squared(const SymTensorField& t) {
    ScalarField out(t.grid, 0.0, t.time);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = t.frobenius_squared(k);
    return out;
}

ScalarField sample(const Grid& grid, const std::function<double(double, double)>& fn, double t) {
    ScalarField out(grid, 0.0, t);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Point p = grid.node(k);
        out[k] = fn(p[0], p[1]);
    }
    return out;
}

ScalarField map(const ScalarField& u, const std::function<double(double)>& fn) {
    ScalarField out(u.grid, 0.0, u.time);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = fn(u[k]);
    return out;
}

}  // namespace harnack
