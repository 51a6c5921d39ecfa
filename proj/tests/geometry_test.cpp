#include "harnack/curvature.hpp"
#include "harnack/cutoff.hpp"
#include "harnack/expression.hpp"
#include "harnack/grid.hpp"
#include "harnack/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace harnack;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

Grid line(int n, double length = kTwoPi) {
    const double l[] = {length};
    const int c[] = {n};
    return make_torus_grid(1, l, c);
}

Grid square(int n, double length = kTwoPi) {
    const double l[] = {length, length};
    const int c[] = {n, n};
    return make_torus_grid(2, l, c);
}

double max_abs_diff(const ScalarField& a, const std::function<double(double, double)>& exact) {
    double e = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const Point p = a.grid.node(k);
        e = std::max(e, std::abs(a[k] - exact(p[0], p[1])));
    }
    return e;
}

}  // namespace

TEST(Grid, IndexWrapsBothWays) {
    const Grid g = square(8);
    EXPECT_EQ(g.index(-1, 0), g.index(7, 0));
    EXPECT_EQ(g.index(8, 9), g.index(0, 1));
    EXPECT_EQ(g.index(3, -2), g.index(3, 6));
}

TEST(Grid, RejectsBadDimensions) {
    const double l[] = {1.0, 1.0, 1.0};
    const int c[] = {8, 8, 8};
    EXPECT_THROW(make_torus_grid(3, l, c), std::invalid_argument);
    const double neg[] = {-1.0};
    const int one[] = {8};
    EXPECT_THROW(make_torus_grid(1, neg, one), std::invalid_argument);
}

TEST(Grid, GeodesicDistanceWrapsAround) {
    const Grid g = square(16, 1.0);
    EXPECT_NEAR(geodesic_distance({0.05, 0.5}, {0.95, 0.5}, g), 0.1, 1e-14);
    EXPECT_NEAR(geodesic_distance({0.05, 0.05}, {0.95, 0.95}, g), std::sqrt(0.02), 1e-14);
    EXPECT_NEAR(periodic_displacement(0.9, 0.1, 1.0), 0.2, 1e-14);
    EXPECT_NEAR(periodic_displacement(0.1, 0.9, 1.0), -0.2, 1e-14);
}

TEST(Grid, GeodesicDistanceExamples) {
    const Grid g = line(64);
    EXPECT_NEAR(geodesic_distance({0.1, 0.0}, {6.2, 0.0}, g), kTwoPi - 6.1, 1e-12);
    const Grid s = square(16, 3.0);
    EXPECT_NEAR(geodesic_distance({0.0, 0.0}, {1.5, 0.0}, s), 1.5, 1e-15);
    EXPECT_EQ(geodesic_distance({0.7, 0.2}, {0.7, 0.2}, s), 0.0);
}

TEST(Grid, NearestNodeWraps) {
    const Grid g = line(10, 1.0);
    EXPECT_EQ(g.nearest_node({0.98, 0.0}), 0u);
    EXPECT_EQ(g.nearest_node({0.31, 0.0}), 3u);
}

TEST(Operators, ExactOnConstants) {
    const Grid g = square(12);
    const ScalarField c(g, 3.5);
    EXPECT_EQ(laplacian(c).sup_abs(), 0.0);
    EXPECT_EQ(norm_squared(gradient(c)).sup_abs(), 0.0);
    EXPECT_EQ(frobenius_squared(hessian(c)).sup_abs(), 0.0);
}

TEST(Operators, GradientIsSecondOrder) {
    double prev = 0.0;
    for (int n : {32, 64, 128}) {
        const Grid g = line(n);
        const ScalarField u = sample(g, [](double x, double) { return std::sin(x); });
        const VectorField du = gradient(u);
        ScalarField dx(g);
        for (std::size_t k = 0; k < g.size(); ++k) dx[k] = du(k, 0);
        const double e = max_abs_diff(dx, [](double x, double) { return std::cos(x); });
        if (prev > 0.0) EXPECT_NEAR(std::log2(prev / e), 2.0, 0.05);
        prev = e;
    }
}

TEST(Operators, MixedHessianEntry) {
    const Grid g = square(64);
    const ScalarField u = sample(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
    const SymTensorField h = hessian(u);
    ScalarField xy(g);
    for (std::size_t k = 0; k < g.size(); ++k) xy[k] = h(k, 0, 1);
    const double hh = g.spacing[0];
    EXPECT_LT(max_abs_diff(xy, [](double x, double y) { return std::cos(x) * std::cos(y); }), hh * hh);
    // trace equals the Laplacian stencil
    const ScalarField lap = laplacian(u);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(h(k, 0, 0) + h(k, 1, 1), lap[k], 1e-12);
}

TEST(Operators, WeightedLaplacian) {
    const Grid g = line(256);
    const ScalarField u = sample(g, [](double x, double) { return std::sin(x); });
    const ScalarField f = sample(g, [](double x, double) { return std::cos(x); });
    // L_f sin = -sin x - (-sin x)(cos x)
    const double e = max_abs_diff(weighted_laplacian(u, f), [](double x, double) {
        return -std::sin(x) + std::sin(x) * std::cos(x);
    });
    EXPECT_LT(e, 1e-3);
}

TEST(Curvature, InfinityVariantOfCosine) {
    const Grid g = line(256);
    const ScalarField f = sample(g, [](double x, double) { return std::cos(x); });
    const CurvatureData cd = bakry_emery(f, BakryEmeryVariant::infinity());
    // Hess f = -cos x, inf = -1 at x = 0
    EXPECT_NEAR(cd.k, 1.0, 1e-3);
    EXPECT_NEAR(cd.k1, 1.0, 1e-3);
    EXPECT_EQ(cd.k2, 0.0);
}

TEST(Curvature, FiniteVariantOfCosine) {
    const Grid g = line(512);
    const ScalarField f = sample(g, [](double x, double) { return std::cos(x); });
    const CurvatureData cd = bakry_emery(f, BakryEmeryVariant::finite(2.0));
    // -cos x - sin^2 x = c^2 - c - 1 with c = cos x, minimum -5/4 at c = 1/2
    EXPECT_NEAR(cd.k, 1.25, 1e-3);
}

TEST(Curvature, MEqualsNNeedsConstantWeight) {
    const Grid g = line(32);
    const ScalarField f = sample(g, [](double x, double) { return std::cos(x); });
    EXPECT_THROW(bakry_emery(f, BakryEmeryVariant::finite(1.0)), std::invalid_argument);
    EXPECT_NO_THROW(bakry_emery(ScalarField(g, 2.0), BakryEmeryVariant::finite(1.0)));
    EXPECT_THROW(bakry_emery(f, BakryEmeryVariant::finite(0.5)), std::invalid_argument);
}

// Expanding each stencil (D1 = d + h^2/6 d^3, D2 = d^2 + h^2/12 d^4) for u = sin x,
// f = cos x leaves a leading residual h^2 (2/3 cos 2x + 7/6 sin^2 x cos x + 1/6 sin^2 x
// - 5/12 cos^2 x + 7/6 cos x cos 2x - 5/12 cos^3 x), whose sup is exactly h^2 at x = 0.
TEST(Curvature, BochnerIdentityConverges) {
    double prev = 0.0;
    double h = 0.0;
    for (int n : {64, 128, 256}) {
        const Grid g = line(n);
        const ScalarField u = sample(g, [](double x, double) { return std::sin(x); });
        const ScalarField f = sample(g, [](double x, double) { return std::cos(x); });
        const double e = bochner_residual(u, f, BochnerIdentity{}).sup_abs();
        h = g.spacing[0];
        if (prev > 0.0) {
            EXPECT_GT(std::log2(prev / e), 1.8);
            EXPECT_LT(std::log2(prev / e), 2.2);
        }
        prev = e;
    }
    EXPECT_NEAR(prev / (h * h), 1.0, 0.01);
}

TEST(Curvature, LoweringKRaisesResidualByGradientSquared) {
    const Grid g = square(32);
    const ScalarField u = sample(g, [](double x, double y) { return std::sin(x) + 0.5 * std::cos(2.0 * y); });
    const ScalarField f = sample(g, [](double x, double y) { return 0.3 * std::cos(x + y); });
    const ScalarField r0 = bochner_residual(u, f, BochnerInequality{3.0, 0.0});
    const ScalarField r1 = bochner_residual(u, f, BochnerInequality{3.0, -1.0});
    const ScalarField gsq = norm_squared(gradient(u));
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(r1[k] - r0[k], gsq[k], 1e-12);
}

TEST(Cutoff, ProfileShape) {
    EXPECT_EQ(cutoff_profile(0.0), 1.0);
    EXPECT_EQ(cutoff_profile(1.0), 1.0);
    EXPECT_EQ(cutoff_profile(2.0), 0.0);
    EXPECT_EQ(cutoff_profile(3.0), 0.0);
    // (1 - s)^3 (1 + 3s) at s = 1/2
    EXPECT_NEAR(cutoff_profile(1.5), 0.125 * 2.5, 1e-15);
    // C^1 at both joins
    EXPECT_NEAR(cutoff_profile_derivative(1.0), 0.0, 1e-15);
    EXPECT_NEAR(cutoff_profile_derivative(2.0), 0.0, 1e-15);
}

TEST(Cutoff, ProfileConstants) {
    // psi'' = -12 (1 - s)(1 - 3s): most negative at s = 0, so C2 = 12.
    // C1 = sup 12 s sqrt(1 - s) / sqrt(1 + 3s), maximised here by golden section.
    const auto c1_of = [](double s) { return 12.0 * s * std::sqrt(1.0 - s) / std::sqrt(1.0 + 3.0 * s); };
    double a = 0.0, b = 1.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 200; ++i) {
        const double c = b - phi * (b - a), d = a + phi * (b - a);
        (c1_of(c) > c1_of(d) ? b : a) = (c1_of(c) > c1_of(d) ? d : c);
    }
    const ProfileConstants pc = cutoff_profile_constants();
    EXPECT_NEAR(pc.c2, 12.0, 1e-9);
    EXPECT_NEAR(pc.c1, c1_of(0.5 * (a + b)), 1e-6);
}

TEST(Cutoff, SupportAndRadiusLimit) {
    const Grid g = square(64);
    const Cutoff c = build_cutoff({std::numbers::pi, std::numbers::pi}, 1.0, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (c.distance[k] <= 1.0) EXPECT_EQ(c.phi[k], 1.0);
        if (c.distance[k] >= 2.0) EXPECT_EQ(c.phi[k], 0.0);
        EXPECT_EQ(c.in_support(k), c.distance[k] <= 2.0);
    }
    EXPECT_THROW(build_cutoff({0.0, 0.0}, kTwoPi / 4.0, g), std::invalid_argument);
}

TEST(Expression, Evaluates) {
    const Expression e = Expression::parse("2*pi + x^2^0.5 - sin(y)*exp(-t)");
    // ^ is right associative: x^(2^0.5)
    EXPECT_NEAR(e.evaluate(4.0, std::numbers::pi / 2.0, 0.0), 2.0 * std::numbers::pi + std::pow(4.0, std::sqrt(2.0)) - 1.0,
                1e-13);
    EXPECT_NEAR(Expression::parse("-2^2").evaluate(0, 0, 0), -4.0, 0.0);
    EXPECT_NEAR(Expression::parse("log(exp(1.5))").evaluate(0, 0, 0), 1.5, 1e-15);
    EXPECT_TRUE(e.depends_on_time());
    EXPECT_TRUE(e.depends_on_space());
    EXPECT_FALSE(Expression::parse("3*pi").depends_on_space());
}

TEST(Expression, NormalizedIgnoresWhitespace) {
    EXPECT_EQ(Expression::parse("1+ 2*x").normalized(), Expression::parse(" 1 + 2 * x ").normalized());
    EXPECT_NE(Expression::parse("1+2*x").normalized(), Expression::parse("(1+2)*x").normalized());
}

TEST(Expression, ErrorsCarryColumn) {
    try {
        Expression::parse("1 + * x");
        FAIL() << "no error";
    } catch (const ExpressionError& e) {
        EXPECT_EQ(e.column(), 4u);
    }
    EXPECT_THROW(Expression::parse("foo(x)"), ExpressionError);
    EXPECT_THROW(Expression::parse("(x + 1"), ExpressionError);
}
