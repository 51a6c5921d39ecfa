#include "harnack/cutoff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace harnack {

namespace {

// Blend p(s) = (1 - s)^3 (1 + 3s) on s in [0, 1].
double blend(double s) { return (1.0 - s) * (1.0 - s) * (1.0 - s) * (1.0 + 3.0 * s); }
double blend_d1(double s) { return -12.0 * s * (1.0 - s) * (1.0 - s); }
double blend_d2(double s) { return -12.0 * (1.0 - s) * (1.0 - 3.0 * s); }

}  // namespace

double cutoff_profile(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    return blend(r - 1.0);
}

double cutoff_profile_derivative(double r) {
    if (r <= 1.0 || r >= 2.0) return 0.0;
    return blend_d1(r - 1.0);
}

double cutoff_profile_second_derivative(double r) {
    if (r <= 1.0 || r >= 2.0) return 0.0;
    return blend_d2(r - 1.0);
}

ProfileConstants cutoff_profile_constants(int samples) {
    // psi is constant on [0, 1] and [2, inf), so only the blend contributes; the
    // blend's one-sided second derivative at s = 0 is included.
    double c1 = 0.0;
    double c2 = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double s = static_cast<double>(i) / samples;
        const double p = blend(s);
        if (p > 0.0) c1 = std::max(c1, std::abs(blend_d1(s)) / std::sqrt(p));
        c2 = std::max(c2, -blend_d2(s));
    }
    return {c1, c2};
}

Cutoff build_cutoff(const Point& center, double radius, const Grid& grid) {
    if (!(radius > 0.0)) throw std::invalid_argument("cutoff radius must be positive");
    if (!(2.0 * radius < 0.5 * grid.min_length())) {
        throw std::invalid_argument("cutoff support too large for the torus: 2R = " + std::to_string(2.0 * radius) +
                                    " must be < min(L)/2 = " + std::to_string(0.5 * grid.min_length()));
    }
    Cutoff c;
    c.center = center;
    c.radius = radius;
    c.distance = ScalarField(grid);
    c.phi = ScalarField(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double d = geodesic_distance(grid.node(k), center, grid);
        c.distance[k] = d;
        c.phi[k] = cutoff_profile(d / radius);
    }
    const ProfileConstants pc = cutoff_profile_constants();
    c.c1 = pc.c1;
    c.c2 = pc.c2;
    return c;
}

}  // namespace harnack
