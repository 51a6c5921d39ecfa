#pragma once

#include "harnack/grid.hpp"

namespace harnack {

/// Radial profile psi: 1 on [0, 1], (1 - s)^3 (1 + 3s) with s = r - 1 on (1, 2),
/// 0 from 2 on. C^1 across both joins; psi'/sqrt(psi) -> 0 at r = 2.
double cutoff_profile(double r);
double cutoff_profile_derivative(double r);
double cutoff_profile_second_derivative(double r);

/// phi(x) = psi(d(x, p) / R) together with the profile constants
///   C1 = sup |psi'| / sqrt(psi),  C2 = sup max(0, -psi'').
struct Cutoff {
    ScalarField phi;
    ScalarField distance;  // d(x, p)
    Point center{0.0, 0.0};
    double radius = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    bool in_support(std::size_t k) const { return distance[k] <= 2.0 * radius; }
};

/// Number of dense samples used for C1 and C2.
inline constexpr int kCutoffProfileSamples = 10000;

struct ProfileConstants {
    double c1;
    double c2;
};

/// C1 and C2 from dense sampling of the profile on [0, 2].
ProfileConstants cutoff_profile_constants(int samples = kCutoffProfileSamples);

/// Requires 2R < min_i(L_i) / 2 so B_p(2R) stays inside the injectivity radius.
Cutoff build_cutoff(const Point& center, double radius, const Grid& grid);

}  // namespace harnack
