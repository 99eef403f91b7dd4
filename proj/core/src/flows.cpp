#include "cotlift/flows.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "cotlift/compiled.hpp"

namespace cotlift {

namespace {

struct CompiledField {
    std::vector<CompiledExpr> components;

    explicit CompiledField(const VectorFieldExpr& field)
        : components(compile_all(field.components, field.chart.coords())) {}

    void eval(const Vec& z, Vec& out) const {
        std::span<const double> zs(z.data(), static_cast<std::size_t>(z.size()));
        for (std::size_t i = 0; i < components.size(); ++i) out[i] = components[i].eval(zs);
    }
};

}  // namespace

Trajectory symplectic_integrate(const Expr& hamiltonian, const DarbouxChart& chart, const Vec& x0,
                                double dt, int steps, const IntegratorOptions& opts) {
    if (dt <= 0.0) throw ValidationError("dt must be positive");
    if (x0.size() != chart.dim()) throw ValidationError("x0 dimension does not match chart");
    CompiledField field(hamiltonian_vector_field(hamiltonian, chart));

    Trajectory traj;
    traj.chart = chart;
    traj.dt = dt;
    traj.steps = steps;
    traj.scheme = "implicit-midpoint";
    if (opts.store_trajectory) {
        traj.times.reserve(steps + 1);
        traj.states.reserve(steps + 1);
    }
    traj.times.push_back(0.0);
    traj.states.push_back(x0);

    const int dim = chart.dim();
    Vec z = x0, w(dim), mid(dim), xdot(dim), w_new(dim);
    for (int k = 0; k < steps; ++k) {
        // predictor: explicit Euler
        field.eval(z, xdot);
        w = z + dt * xdot;
        double prev = std::numeric_limits<double>::infinity();
        bool converged = false;
        double delta = prev;
        for (int it = 0; it < opts.max_iterations; ++it) {
            mid = 0.5 * (z + w);
            field.eval(mid, xdot);
            w_new = z + dt * xdot;
            delta = (w_new - w).cwiseAbs().maxCoeff();
            w = w_new;
            if (delta == 0.0 || (delta <= opts.fixed_point_tol && delta >= prev)) {
                converged = true;
                break;
            }
            prev = delta;
        }
        if (!converged && delta > opts.fixed_point_tol)
            throw FixedPointDivergenceError(
                "implicit midpoint fixed point did not converge (dt too large?)");
        z = w;
        if (opts.store_trajectory || k == steps - 1) {
            traj.times.push_back(dt * (k + 1));
            traj.states.push_back(z);
        }
    }
    return traj;
}

DriftReport conserved_along_flow(const MomentMapSystem& system, const Trajectory& trajectory,
                                 double tol) {
    DriftReport report;
    report.tol = tol;
    auto progs = compile_all(system.components(), system.chart().coords());
    report.max_drift.assign(system.size(), 0.0);
    if (trajectory.states.empty()) return report;
    std::vector<double> initial(system.size());
    const Vec& z0 = trajectory.states.front();
    for (int i = 0; i < system.size(); ++i)
        initial[i] = progs[i].eval({z0.data(), static_cast<std::size_t>(z0.size())});
    for (const Vec& z : trajectory.states) {
        std::span<const double> zs(z.data(), static_cast<std::size_t>(z.size()));
        for (int i = 0; i < system.size(); ++i) {
            double drift = std::abs(progs[i].eval(zs) - initial[i]);
            report.max_drift[i] = std::max(report.max_drift[i], drift);
        }
    }
    for (double d : report.max_drift) report.worst = std::max(report.worst, d);
    report.pass = report.worst <= tol;
    return report;
}

namespace {

// One classical RK4 step.
void rk4_step(const CompiledField& field, Vec& z, double dt, Vec& k1, Vec& k2, Vec& k3, Vec& k4,
              Vec& tmp) {
    field.eval(z, k1);
    tmp = z + (0.5 * dt) * k1;
    field.eval(tmp, k2);
    tmp = z + (0.5 * dt) * k2;
    field.eval(tmp, k3);
    tmp = z + dt * k3;
    field.eval(tmp, k4);
    z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// RK4 step in the section coordinate s = y - cy (Henon's trick): integrates
// dz/ds = X/s_dot, dt/ds = 1/s_dot for a step of exactly ds, landing on the
// section to integrator order.
void henon_step(const CompiledField& field, Vec& z, double& t, double ds) {
    const int dim = static_cast<int>(z.size());
    Vec zt(dim + 1);
    zt.head(dim) = z;
    zt[dim] = t;
    auto rhs = [&](const Vec& state, Vec& out) {
        Vec pos = state.head(dim);
        Vec v(dim);
        field.eval(pos, v);
        double sdot = v[1];
        out.head(dim) = v / sdot;
        out[dim] = 1.0 / sdot;
    };
    Vec k1(dim + 1), k2(dim + 1), k3(dim + 1), k4(dim + 1), tmp(dim + 1);
    rhs(zt, k1);
    tmp = zt + (0.5 * ds) * k1;
    rhs(tmp, k2);
    tmp = zt + (0.5 * ds) * k2;
    rhs(tmp, k3);
    tmp = zt + ds * k3;
    rhs(tmp, k4);
    zt += (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    z = zt.head(dim);
    t = zt[dim];
}

}  // namespace

LevelTrace trace_closed_level(const Expr& f, const DarbouxChart& chart, double c,
                              const LevelTraceOptions& opts) {
    if (chart.dof() != 1) throw ValidationError("level tracing expects a 1-DOF chart");
    Vec center = opts.center.size() == 2 ? opts.center : Vec::Zero(2);

    auto coords = chart.coords();
    CompiledExpr fprog(f, coords);
    auto feval = [&](double x, double y) {
        double pt[2] = {x, y};
        return fprog.eval({pt, 2});
    };

    // Start point on the ray {y = cy, x > cx}: bracket then bisect.
    double f0 = feval(center[0], center[1]);
    double target = c;
    double r_lo = 0.0, r_hi = -1.0;
    double g_lo = f0 - target;
    double r = 1e-6;
    while (r <= opts.bracket_max_radius) {
        double g = feval(center[0] + r, center[1]) - target;
        if ((g_lo <= 0.0 && g >= 0.0) || (g_lo >= 0.0 && g <= 0.0)) {
            r_hi = r;
            break;
        }
        r_lo = r;
        g_lo = g;
        r *= 1.5;
    }
    if (r_hi < 0.0)
        throw NonCompactLevelError("no level crossing found along the ray through the center");
    for (int it = 0; it < 200; ++it) {
        double rm = 0.5 * (r_lo + r_hi);
        double gm = feval(center[0] + rm, center[1]) - target;
        if ((g_lo <= 0.0 && gm <= 0.0) || (g_lo >= 0.0 && gm >= 0.0)) {
            r_lo = rm;
            g_lo = gm;
        } else {
            r_hi = rm;
        }
        if (r_hi - r_lo < 1e-15 * (1.0 + r_hi)) break;
    }
    Vec start(2);
    start << center[0] + 0.5 * (r_lo + r_hi), center[1];

    CompiledField field(hamiltonian_vector_field(f, chart));
    Vec v0(2);
    field.eval(start, v0);
    double speed = v0.norm();
    if (speed < 1e-10)
        throw CriticalLevelError("level passes through a critical point of f (zero velocity)");
    if (std::abs(v0[1]) < 1e-12 * speed)
        throw CriticalLevelError("flow is tangent to the ray section at the start point");
    const double sdot_sign = v0[1] > 0.0 ? 1.0 : -1.0;

    double radius = (start - center).norm();
    double period_guess = 2.0 * std::numbers::pi * std::max(radius, 1e-6) / speed;

    auto find_period = [&](double dt, long budget) {
        Vec z = start;
        Vec k1(2), k2(2), k3(2), k4(2), tmp(2);
        double t = 0.0;
        double s_prev = 0.0;  // on section at start
        long step = 0;
        bool armed = false;  // must leave the section neighborhood first
        while (step < budget) {
            rk4_step(field, z, dt, k1, k2, k3, k4, tmp);
            t += dt;
            ++step;
            double s = z[1] - center[1];
            if (!armed) {
                if (std::abs(s) > 10.0 * std::abs(dt * v0[1]) || step > 8) armed = true;
            } else if (s_prev * s < 0.0 && z[0] > center[0]) {
                Vec v(2);
                field.eval(z, v);
                if (v[1] * sdot_sign > 0.0) {
                    Vec zc = z;
                    double tc = t;
                    henon_step(field, zc, tc, -s);
                    if ((zc - start).norm() <= std::max(opts.return_tol, 1e4 * dt * dt * dt * dt))
                        return std::make_tuple(tc, zc, true);
                    // crossed the section away from the start: keep going
                }
            }
            s_prev = s;
        }
        return std::make_tuple(0.0, z, false);
    };

    double dt0 = period_guess / opts.coarse_steps;
    auto [t_coarse, z_coarse, found] = find_period(dt0, opts.step_budget / 2);
    if (!found)
        throw NonCompactLevelError("flow did not return to the start within the step budget");

    // Fine pass: fixed dt over the detected period, trapezoid area with exact
    // velocities (periodic in time, so the rule is spectrally accurate).
    const int n = opts.fine_steps;
    double dt = t_coarse / n;
    Vec z = start;
    Vec k1(2), k2(2), k3(2), k4(2), tmp(2), v(2);
    LevelTrace trace;
    trace.start = start;
    trace.curve.reserve(n + 1);
    double area = 0.0;
    for (int kstep = 0; kstep < n; ++kstep) {
        field.eval(z, v);
        area += 0.5 * (z[0] * v[1] - z[1] * v[0]) * dt;
        trace.curve.push_back(z);
        rk4_step(field, z, dt, k1, k2, k3, k4, tmp);
    }
    trace.curve.push_back(z);
    trace.period = t_coarse;
    trace.area = area;
    trace.return_error = (z - start).norm();
    if (trace.return_error > opts.return_tol)
        throw NonCompactLevelError("fine trace did not close up (return error " +
                                   std::to_string(trace.return_error) + ")");
    return trace;
}

double action_variable_1dof(const Expr& f, const DarbouxChart& chart, double c,
                            const LevelTraceOptions& opts) {
    LevelTrace trace = trace_closed_level(f, chart, c, opts);
    return std::abs(trace.area) / (2.0 * std::numbers::pi);
}

}  // namespace cotlift
