#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace harnack {

using Point = std::array<double, 2>;

/// Periodic structured grid on the flat torus T^d = R^d / (L_1 Z x ... x L_d Z),
/// d in {1, 2}. Node (i, j) sits at (i h_0, j h_1).
struct Grid {
    int dim = 1;
    std::array<double, 2> lengths{1.0, 1.0};
    std::array<int, 2> counts{8, 1};
    std::array<double, 2> spacing{0.125, 1.0};

    std::size_t size() const {
        return static_cast<std::size_t>(counts[0]) * static_cast<std::size_t>(counts[1]);
    }

    std::size_t index(int i, int j = 0) const {
        const int n0 = counts[0];
        const int n1 = counts[1];
        i %= n0;
        if (i < 0) i += n0;
        j %= n1;
        if (j < 0) j += n1;
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(n0) * static_cast<std::size_t>(j);
    }

    std::array<int, 2> multi_index(std::size_t k) const {
        const auto n0 = static_cast<std::size_t>(counts[0]);
        return {static_cast<int>(k % n0), static_cast<int>(k / n0)};
    }

    Point node(std::size_t k) const {
        const auto ij = multi_index(k);
        return {ij[0] * spacing[0], dim == 2 ? ij[1] * spacing[1] : 0.0};
    }

    /// Volume of one grid cell (h_0 for d = 1, h_0 h_1 for d = 2).
    double cell_volume() const { return dim == 2 ? spacing[0] * spacing[1] : spacing[0]; }

    double max_spacing() const { return dim == 2 ? std::max(spacing[0], spacing[1]) : spacing[0]; }
    double min_spacing() const { return dim == 2 ? std::min(spacing[0], spacing[1]) : spacing[0]; }
    double min_length() const { return dim == 2 ? std::min(lengths[0], lengths[1]) : lengths[0]; }

    /// Nearest grid node to a point (with periodic wrap).
    std::size_t nearest_node(const Point& p) const;

    /// Same grid with every node count multiplied by `factor`.
    Grid refined(int factor) const;

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.dim == b.dim && a.counts == b.counts && a.lengths == b.lengths;
    }
};

Grid make_torus_grid(int dim, std::span<const double> lengths, std::span<const int> counts);

/// Shortest signed displacement b - a on a circle of the given period.
double periodic_displacement(double a, double b, double period);

/// Geodesic distance on the flat torus: per-axis wraparound minimum, combined Euclidean.
double geodesic_distance(const Point& a, const Point& b, const Grid& grid);

/// One real value per node.
struct ScalarField {
    Grid grid;
    std::vector<double> values;
    double time = 0.0;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0, double t = 0.0)
        : grid(g), values(g.size(), fill), time(t) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }

    double max() const;
    double min() const;
    double sup_abs() const;
    /// Index of the first node attaining the maximum (fixed scan order).
    std::size_t argmax() const;
    std::size_t argmin() const;
    /// Riemann sum with the unweighted volume element.
    double integral() const;
    bool all_finite() const;
};

/// d components per node, node-major.
struct VectorField {
    Grid grid;
    std::vector<double> values;
    double time = 0.0;

    VectorField() = default;
    explicit VectorField(const Grid& g, double t = 0.0)
        : grid(g), values(g.size() * static_cast<std::size_t>(g.dim), 0.0), time(t) {}

    double& operator()(std::size_t k, int axis) { return values[k * grid.dim + axis]; }
    double operator()(std::size_t k, int axis) const { return values[k * grid.dim + axis]; }

    double norm_squared(std::size_t k) const;
};

/// Symmetric d x d matrix per node. Components are stored once: (xx) for d = 1,
/// (xx, xy, yy) for d = 2, so T_xy == T_yx holds by construction.
struct SymTensorField {
    Grid grid;
    std::vector<double> values;
    double time = 0.0;

    static int components(int dim) { return dim * (dim + 1) / 2; }

    SymTensorField() = default;
    explicit SymTensorField(const Grid& g, double t = 0.0)
        : grid(g), values(g.size() * static_cast<std::size_t>(components(g.dim)), 0.0), time(t) {}

    double& operator()(std::size_t k, int a, int b) { return values[slot(k, a, b)]; }
    double operator()(std::size_t k, int a, int b) const { return values[slot(k, a, b)]; }

    /// Hilbert-Schmidt norm squared at node k.
    double frobenius_squared(std::size_t k) const;
    /// Smallest eigenvalue at node k (closed form, d <= 2).
    double min_eigenvalue(std::size_t k) const;
    /// v^T T v for a vector field v at node k.
    double quadratic_form(std::size_t k, const VectorField& v) const;

private:
    std::size_t slot(std::size_t k, int a, int b) const {
        const auto nc = static_cast<std::size_t>(components(grid.dim));
        if (grid.dim == 1) return k;
        return k * nc + static_cast<std::size_t>(a + b);
    }
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace harnack
