#include "harnack/solver.hpp"
#include "harnack/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace harnack;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

Grid line(int n) {
    const double l[] = {kTwoPi};
    const int c[] = {n};
    return make_torus_grid(1, l, c);
}

Model heat(const Grid& g, const std::string& f = "0") {
    return Model(g, {Expression::parse(f)}, {}, nl::Zero{});
}

// Logistic ODE w' = -w(1 - w) from w(0) = 1/2: w(t) = 1 / (1 + e^t).
double logistic_error(double dt) {
    const Grid g = line(8);
    const Model m(g, {}, {}, nl::FisherKpp{1.0});
    const Trajectory tr = evolve(m, ScalarField(g, 0.5), 1.0, {1.0}, dt);
    return std::abs(tr.snapshots.back().w[0] - 1.0 / (1.0 + std::exp(1.0)));
}

// Heat from 2 + sin x: exact 2 + e^{-t} sin x. Relative error is sup|e| / sup|exact|.
double fourier_error(int n, double dt, double t_end = 1.0) {
    const Grid g = line(n);
    const ScalarField w0 = sample(g, [](double x, double) { return 2.0 + std::sin(x); });
    const Trajectory tr = evolve(heat(g), w0, t_end, {t_end}, dt);
    const ScalarField& w = tr.snapshots.back().w;
    double e = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double exact = 2.0 + std::exp(-t_end) * std::sin(g.node(k)[0]);
        e = std::max(e, std::abs(w[k] - exact));
        scale = std::max(scale, std::abs(exact));
    }
    return e / scale;
}

}  // namespace

TEST(Solver, LogisticBenchmark) {
    EXPECT_LE(logistic_error(1e-3), 1e-6);
    EXPECT_NEAR(1.0 / (1.0 + std::exp(1.0)), 0.268941, 1e-6);
}

TEST(Solver, LogisticTimeOrderIsFour) {
    const double r = logistic_error(0.1) / logistic_error(0.05);
    EXPECT_GE(r, 12.0);
    EXPECT_LE(r, 20.0);
}

TEST(Solver, FourierDecay) {
    // Leading term: the discrete eigenvalue is 1 - h^2/12, so sup|e| ~ t e^{-t} h^2 / 12.
    const double h = kTwoPi / 256.0;
    const double predicted = std::exp(-1.0) * h * h / 12.0 / (2.0 + std::exp(-1.0));
    const double e = fourier_error(256, 1e-4);
    EXPECT_LE(e, 1e-5);
    EXPECT_NEAR(e / predicted, 1.0, 0.02);
}

TEST(Solver, FourierSpaceOrderIsTwo) {
    // dt small enough that the spatial error dominates at both resolutions.
    const double r = fourier_error(32, 2e-4) / fourier_error(64, 2e-4);
    EXPECT_GE(r, 3.5);
    EXPECT_LE(r, 4.5);
}

TEST(Solver, UnweightedMassConservedForPureHeat) {
    const Grid g = line(128);
    const ScalarField w0 = sample(g, [](double x, double) { return 1.0 + 0.5 * std::cos(3.0 * x) + 0.2 * std::sin(x); });
    const Trajectory tr = evolve(heat(g), w0, 0.5, {0.25, 0.5}, stable_dt(heat(g), 0.5, 0.3, 1.7));
    for (const Snapshot& s : tr.snapshots) EXPECT_NEAR(s.w.integral(), w0.integral(), 1e-10);
}

TEST(Solver, MaximumPrinciple) {
    const Grid g = line(128);
    const Model m = heat(g, "0.5*cos(x)");
    const ScalarField w0 = sample(g, [](double x, double) { return 1.0 + 0.8 * std::sin(2.0 * x); });
    const Trajectory tr = evolve(m, w0, 1.0, {0.1, 0.5, 1.0}, stable_dt(m, 0.5, w0.min(), w0.max()));
    double lo = w0.min(), hi = w0.max();
    for (const Snapshot& s : tr.snapshots) {
        EXPECT_GE(s.w.min(), lo - 1e-12);
        EXPECT_LE(s.w.max(), hi + 1e-12);
        lo = s.w.min();
        hi = s.w.max();
    }
}

TEST(Solver, SnapshotTimeDerivativeIsRhs) {
    const Grid g = line(64);
    const Model m(g, {Expression::parse("0.3*cos(x)")}, {Expression::parse("0.1")}, nl::FisherKpp{1.0});
    const ScalarField w0 = sample(g, [](double x, double) { return 0.5 + 0.2 * std::sin(x); });
    const Trajectory tr = evolve(m, w0, 0.3, {0.0, 0.3}, 0.002);
    ASSERT_EQ(tr.snapshots.size(), 2u);
    for (const Snapshot& s : tr.snapshots) {
        const ScalarField r = rhs(m, s.w, s.t);
        EXPECT_EQ(r.values, s.w_t.values);
    }
    EXPECT_EQ(tr.snapshots[0].w.values, w0.values);
}

TEST(Solver, LandsExactlyOnOutputTimes) {
    const Grid g = line(16);
    const ScalarField w0(g, 1.0);
    const Trajectory tr = evolve(heat(g), w0, 1.0, {0.1, 0.33, 1.0}, 0.07);
    ASSERT_EQ(tr.snapshots.size(), 3u);
    EXPECT_EQ(tr.snapshots[0].t, 0.1);
    EXPECT_EQ(tr.snapshots[1].t, 0.33);
    EXPECT_EQ(tr.snapshots[2].t, 1.0);
    EXPECT_THROW(evolve(heat(g), w0, 1.0, {0.5, 0.2}, 0.1), std::invalid_argument);
    EXPECT_THROW(evolve(heat(g), w0, 1.0, {1.5}, 0.1), std::invalid_argument);
}

TEST(Solver, StableDtFormula) {
    const Grid g = line(64);
    const double h = kTwoPi / 64.0;
    EXPECT_NEAR(stable_dt(heat(g), 0.5, 1.0, 1.0), 0.5 * h * h / 2.0, 1e-15);
    // sup|grad f| = 2 for f = 2 sin x (sampled, so slightly below).
    const Model drift = heat(g, "2*sin(x)");
    const double expected = 0.5 * h * h / (2.0 * (1.0 + 2.0 * h));
    EXPECT_NEAR(stable_dt(drift, 0.5, 1.0, 1.0), expected, 1e-3 * expected);
}

TEST(Solver, PositivityLossAborts) {
    // Constant G = 5 drives w_t = -5 and crosses zero near t = 0.2.
    const Grid g = line(16);
    const nl::CustomTable t{{0.0, 10.0}, {5.0, 5.0}, {0.0, 0.0}, {}};
    const Model m(g, {}, {}, t);
    try {
        evolve(m, ScalarField(g, 1.0), 1.0, {1.0}, 0.01);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_NEAR(e.time(), 0.2, 0.011);
        EXPECT_LE(e.value(), 0.0);
    }
}

TEST(Solver, SteadyNormOfFourierMode) {
    // rhs(2 + sin x) = -sin x up to O(h^2).
    const Grid g = line(256);
    const ScalarField w = sample(g, [](double x, double) { return 2.0 + std::sin(x); });
    EXPECT_NEAR(steady_state_norm(heat(g), w, 0.0), 1.0, 1e-4);
    EXPECT_EQ(steady_state_norm(heat(g), ScalarField(g, 3.0), 0.0), 0.0);
}
