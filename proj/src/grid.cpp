#include "harnack/grid.hpp"

#include <cmath>
#include <sstream>

namespace harnack {

Grid make_torus_grid(int dim, std::span<const double> lengths, std::span<const int> counts) {
    if (dim != 1 && dim != 2) {
        throw std::invalid_argument("torus dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (lengths.size() != static_cast<std::size_t>(dim) || counts.size() != static_cast<std::size_t>(dim)) {
        throw std::invalid_argument("expected " + std::to_string(dim) + " lengths and counts");
    }
    Grid g;
    g.dim = dim;
    g.lengths = {1.0, 1.0};
    g.counts = {1, 1};
    g.spacing = {1.0, 1.0};
    for (int a = 0; a < dim; ++a) {
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
            throw std::invalid_argument("torus period lengths must be positive and finite");
        }
        if (counts[a] < 8) {
            throw std::invalid_argument("resolution too low: node count " + std::to_string(counts[a]) +
                                        " < 8 on axis " + std::to_string(a));
        }
        g.lengths[a] = lengths[a];
        g.counts[a] = counts[a];
        g.spacing[a] = lengths[a] / counts[a];
    }
    return g;
}

std::size_t Grid::nearest_node(const Point& p) const {
    const auto snap = [&](double x, int axis) {
        const long k = std::lround(x / spacing[axis]);
        long n = counts[axis];
        long r = k % n;
        if (r < 0) r += n;
        return static_cast<int>(r);
    };
    return index(snap(p[0], 0), dim == 2 ? snap(p[1], 1) : 0);
}

Grid Grid::refined(int factor) const {
    std::vector<double> l(lengths.begin(), lengths.begin() + dim);
    std::vector<int> c(counts.begin(), counts.begin() + dim);
    for (auto& n : c) n *= factor;
    return make_torus_grid(dim, l, c);
}

double periodic_displacement(double a, double b, double period) {
    double d = std::fmod(b - a, period);
    if (d > 0.5 * period) d -= period;
    if (d < -0.5 * period) d += period;
    return d;
}

double geodesic_distance(const Point& a, const Point& b, const Grid& grid) {
    double sum = 0.0;
    for (int axis = 0; axis < grid.dim; ++axis) {
        const double d = std::abs(b[axis] - a[axis]);
        const double m = std::min(d, grid.lengths[axis] - d);
        sum += m * m;
    }
    return std::sqrt(sum);
}

double ScalarField::max() const {
    double m = values.front();
    for (double v : values) m = std::max(m, v);
    return m;
}

double ScalarField::min() const {
    double m = values.front();
    for (double v : values) m = std::min(m, v);
    return m;
}

double ScalarField::sup_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

std::size_t ScalarField::argmax() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] > values[best]) best = k;
    }
    return best;
}

std::size_t ScalarField::argmin() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] < values[best]) best = k;
    }
    return best;
}

double ScalarField::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.cell_volume();
}

bool ScalarField::all_finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double VectorField::norm_squared(std::size_t k) const {
    double s = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
        const double c = (*this)(k, a);
        s += c * c;
    }
    return s;
}

double SymTensorField::frobenius_squared(std::size_t k) const {
    if (grid.dim == 1) {
        const double xx = (*this)(k, 0, 0);
        return xx * xx;
    }
    const double xx = (*this)(k, 0, 0);
    const double xy = (*this)(k, 0, 1);
    const double yy = (*this)(k, 1, 1);
    return xx * xx + 2.0 * xy * xy + yy * yy;
}

double SymTensorField::min_eigenvalue(std::size_t k) const {
    if (grid.dim == 1) return (*this)(k, 0, 0);
    const double xx = (*this)(k, 0, 0);
    const double xy = (*this)(k, 0, 1);
    const double yy = (*this)(k, 1, 1);
    const double mean = 0.5 * (xx + yy);
    const double half_diff = 0.5 * (xx - yy);
    return mean - std::hypot(half_diff, xy);
}

double SymTensorField::quadratic_form(std::size_t k, const VectorField& v) const {
    if (grid.dim == 1) {
        const double vx = v(k, 0);
        return (*this)(k, 0, 0) * vx * vx;
    }
    const double vx = v(k, 0);
    const double vy = v(k, 1);
    return (*this)(k, 0, 0) * vx * vx + 2.0 * (*this)(k, 0, 1) * vx * vy + (*this)(k, 1, 1) * vy * vy;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) {
        std::ostringstream os;
        os << where << ": grid mismatch";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace harnack
