#pragma once

#include <string>
#include <vector>

#include "cotlift/chart.hpp"
#include "cotlift/symplectic.hpp"

namespace cotlift {

class FixedPointDivergenceError : public Error {
public:
    using Error::Error;
};

class NonCompactLevelError : public Error {
public:
    using Error::Error;
};

class CriticalLevelError : public Error {
public:
    using Error::Error;
};

struct Trajectory {
    DarbouxChart chart;
    std::vector<double> times;
    std::vector<Vec> states;  // steps + 1 entries
    double dt = 0.0;
    int steps = 0;
    std::string scheme;
};

struct IntegratorOptions {
    // Fixed-point tolerance per step; iteration continues past it while the
    // update norm still strictly decreases, so quadratic invariants are
    // conserved to roundoff rather than to tol.
    double fixed_point_tol = 1e-12;
    int max_iterations = 50;
    bool store_trajectory = true;
};

// Implicit midpoint flow of X_H. Throws FixedPointDivergenceError when a step
// does not contract (dt too large for the local Lipschitz constant).
Trajectory symplectic_integrate(const Expr& hamiltonian, const DarbouxChart& chart, const Vec& x0,
                                double dt, int steps, const IntegratorOptions& opts = {});

struct DriftReport {
    std::vector<double> max_drift;  // per component of F
    double worst = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// Max drift of every f_i along the trajectory (involution implies
// conservation when the trajectory follows one of the X_{f_j}).
DriftReport conserved_along_flow(const MomentMapSystem& system, const Trajectory& trajectory,
                                 double tol = 1e-9);

struct LevelTraceOptions {
    Vec center;                      // marked point the level encloses; default origin
    double return_tol = 1e-8;        // phase-space return threshold at the section
    long step_budget = 10'000'000;   // total RK4 steps before NonCompactLevelError
    int coarse_steps = 4096;         // first-pass steps per estimated period
    int fine_steps = 32768;          // second-pass steps per period
    double bracket_max_radius = 16.0;
};

struct LevelTrace {
    double period = 0.0;
    double area = 0.0;      // signed enclosed area
    Vec start;
    double return_error = 0.0;
    std::vector<Vec> curve;  // fine-pass points (one period)
};

// Traces the compact component of {f = c} around the marked point by
// following X_f for one period (ray-section first return, exact final
// crossing step) and integrates the enclosed area.
LevelTrace trace_closed_level(const Expr& f, const DarbouxChart& chart, double c,
                              const LevelTraceOptions& opts = {});

// Enclosed area / (2 pi) of the compact level component.
double action_variable_1dof(const Expr& f, const DarbouxChart& chart, double c,
                            const LevelTraceOptions& opts = {});

}  // namespace cotlift
