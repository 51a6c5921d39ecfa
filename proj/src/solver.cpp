#include "harnack/solver.hpp"

#include "harnack/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace harnack {

namespace {

std::string describe(const char* what, const Point& p, double t, double v) {
    std::ostringstream os;
    os.precision(10);
    os << what << " at (" << p[0] << ", " << p[1] << "), t = " << t << ": w = " << v;
    return os.str();
}

void check_state(const ScalarField& w, double t) {
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double v = w[k];
        if (!std::isfinite(v)) throw SolverError(describe("non-finite value", w.grid.node(k), t, v), w.grid.node(k), t, v);
        if (!(v > 0.0)) throw SolverError(describe("positivity lost", w.grid.node(k), t, v), w.grid.node(k), t, v);
    }
}

ScalarField axpy(const ScalarField& w, double a, const ScalarField& k) {
    ScalarField out = w;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * k[i];
    return out;
}

double l2_squared(const ScalarField& w) {
    double s = 0.0;
    for (double v : w.values) s += v * v;
    return s * w.grid.cell_volume();
}

}  // namespace

ScalarField rhs(const Model& model, const ScalarField& w, double t) {
    check_state(w, t);
    const auto c = model.coefficients(t);
    ScalarField out = weighted_laplacian(w, c->grad_f);
    out.time = t;
    const Nonlinearity& nl = model.nonlinearity();
    SourceTerms s;
    if (model.has_source()) s.lambda = caffarelli_lin_lambda(w, c->source);
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (model.has_source()) s.source = c->source[k];
        double g = 0.0;
        try {
            g = g_eval(nl, w[k], s);
        } catch (const DomainError& e) {
            const Point p = w.grid.node(k);
            throw SolverError(describe(e.what(), p, t, w[k]), p, t, w[k]);
        }
        out[k] -= c->q[k] * w[k] + g;
    }
    return out;
}

double stable_dt(const Model& model, double safety, double w_lo, double w_hi) {
    if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("safety must lie in (0, 1]");
    const Grid& grid = model.grid();
    const auto c = model.coefficients(0.0);
    double grad_f_sup = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) grad_f_sup = std::max(grad_f_sup, std::sqrt(c->grad_f.norm_squared(k)));
    const double h = grid.min_spacing();
    const double diffusion = h * h / (2.0 * grid.dim * (1.0 + grad_f_sup * h));

    double g_prime_sup = 0.0;
    SourceTerms s;
    if (model.has_source()) {
        // lambda depends on w itself; use a uniform state at the top of the range.
        const ScalarField wc(grid, w_hi);
        s.lambda = caffarelli_lin_lambda(wc, c->source);
    }
    constexpr int samples = 64;
    for (int i = 0; i <= samples; ++i) {
        const double w = w_lo + (w_hi - w_lo) * i / samples;
        try {
            g_prime_sup = std::max(g_prime_sup, std::abs(g_prime(model.nonlinearity(), w, s)));
        } catch (const DomainError&) {
            // endpoints of open ranges; the run itself reports real violations
        }
    }
    const double reaction = 1.0 / (1.0 + c->q.sup_abs() + g_prime_sup);
    return safety * std::min(diffusion, reaction);
}

ScalarField step_rk4(const Model& model, const ScalarField& w, double t, double dt) {
    const ScalarField k1 = rhs(model, w, t);
    const ScalarField k2 = rhs(model, axpy(w, 0.5 * dt, k1), t + 0.5 * dt);
    const ScalarField k3 = rhs(model, axpy(w, 0.5 * dt, k2), t + 0.5 * dt);
    const ScalarField k4 = rhs(model, axpy(w, dt, k3), t + dt);
    ScalarField out = w;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out.time = t + dt;
    return out;
}

double steady_state_norm(const Model& model, const ScalarField& w, double t) { return rhs(model, w, t).sup_abs(); }

Trajectory evolve(const Model& model, const ScalarField& w0, double t_end, const std::vector<double>& output_times,
                  double dt) {
    require_same_grid(model.grid(), w0.grid, "evolve");
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(t_end > w0.time)) throw std::invalid_argument("t_end must exceed the initial time");
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        if (output_times[i] < w0.time || output_times[i] > t_end) {
            throw std::invalid_argument("output time " + std::to_string(output_times[i]) + " outside the run");
        }
        if (i > 0 && !(output_times[i] > output_times[i - 1])) {
            throw std::invalid_argument("output times must be strictly increasing");
        }
    }

    Trajectory traj;
    RunStats& st = traj.stats;
    st.dt = dt;
    ScalarField w = w0;
    double t = w0.time;
    check_state(w, t);
    st.min_w = w.min();
    st.max_w = w.max();
    st.min_w_time = t;
    st.min_w_location = w.grid.node(w.argmin());
    st.l2_squared_initial = l2_squared(w);

    const auto record = [&](double time) {
        w.time = time;
        Snapshot s;
        s.t = time;
        s.step = st.steps;
        s.w = w;
        s.w_t = rhs(model, w, time);
        st.steady_norms.push_back(s.w_t.sup_abs());
        traj.snapshots.push_back(std::move(s));
    };

    std::vector<double> targets = output_times;
    if (targets.empty() || targets.back() < t_end) targets.push_back(t_end);
    std::size_t next = 0;
    const std::size_t n_outputs = output_times.size();
    if (next < n_outputs && targets[next] == t) {
        record(t);
        ++next;
    }
    for (std::size_t target = next; target < targets.size(); ++target) {
        const double t_next = targets[target];
        while (t < t_next) {
            // Final step of a segment is shortened (or stretched by < 1e-9 dt)
            // so the segment ends exactly on t_next.
            const double h = (t + dt >= t_next - 1e-9 * dt) ? t_next - t : dt;
            w = step_rk4(model, w, t, h);
            t = (h == t_next - t) ? t_next : t + h;
            ++st.steps;
            check_state(w, t);
            const std::size_t kmin = w.argmin();
            if (w[kmin] < st.min_w) {
                st.min_w = w[kmin];
                st.min_w_time = t;
                st.min_w_location = w.grid.node(kmin);
            }
            st.max_w = std::max(st.max_w, w.max());
        }
        if (target < n_outputs) record(t);
    }
    st.l2_squared_final = l2_squared(w);
    return traj;
}

}  // namespace harnack
