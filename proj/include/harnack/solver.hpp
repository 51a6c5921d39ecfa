#pragma once

#include "harnack/model.hpp"

#include <stdexcept>
#include <vector>

namespace harnack {

/// Loss of positivity or a non-finite value during time stepping.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& message, Point location, double time, double value)
        : std::runtime_error(message), location_(location), time_(time), value_(value) {}

    const Point& location() const { return location_; }
    double time() const { return time_; }
    double value() const { return value_; }

private:
    Point location_;
    double time_;
    double value_;
};

/// dw/dt = L_f w - q w - G(w). For Caffarelli-Lin, lambda(t) is recomputed from w.
ScalarField rhs(const Model& model, const ScalarField& w, double t);

/// safety * min(h^2 / (2 d (1 + sup|grad f| h)), 1 / (1 + sup|q| + sup|G'|)), with
/// sup|G'| sampled over [w_lo, w_hi].
double stable_dt(const Model& model, double safety, double w_lo, double w_hi);

/// One classical four-stage Runge-Kutta step.
ScalarField step_rk4(const Model& model, const ScalarField& w, double t, double dt);

/// sup |rhs(w, t)|.
double steady_state_norm(const Model& model, const ScalarField& w, double t);

struct Snapshot {
    double t = 0.0;
    long step = 0;
    ScalarField w;
    ScalarField w_t;  // rhs(w, t), not a time difference
};

struct RunStats {
    double dt = 0.0;
    long steps = 0;
    double min_w = 0.0;
    double min_w_time = 0.0;
    Point min_w_location{0.0, 0.0};
    double max_w = 0.0;
    std::vector<double> steady_norms;  // one per snapshot
    double l2_squared_initial = 0.0;   // int w^2 dmu, monitored for Caffarelli-Lin
    double l2_squared_final = 0.0;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    RunStats stats;
};

/// Integrates from w0 (at time w0.time) to t_end with fixed step dt, landing
/// exactly on every output time. Output times must be increasing and lie in
/// [w0.time, t_end]. Positivity and finiteness are checked after every step.
Trajectory evolve(const Model& model, const ScalarField& w0, double t_end, const std::vector<double>& output_times,
                  double dt);

}  // namespace harnack
