#pragma once

#include <cstdint>

#include "cotlift/action.hpp"
#include "cotlift/maps.hpp"
#include "cotlift/symplectic.hpp"

namespace cotlift {

// Global orientation of fundamental vector fields: X^# is the t-derivative at
// t = 0 along exp(-tX). Moment maps pair lambda with these fields, and the
// closure identity i_{X^#} dlambda = -d mu_X holds exactly for this choice.
inline constexpr double kFundamentalFieldSign = -1.0;

// Cotangent lift of an expression-defined action: base block unchanged,
// momentum block transformed by the inverse-transpose base Jacobian
// (closed-form adjugate; base dimension at most 4).
class LiftedAction {
public:
    const ActionSpec& source() const { return source_; }
    const DarbouxChart& phase_chart() const { return phase_chart_; }
    // 2m expressions over phase-chart coordinates plus group parameters.
    const std::vector<Expr>& components() const { return components_; }

    // The lifted diffeomorphism at a fixed group element, as a map of the
    // phase chart.
    ExprMap map_at(const Vec& params) const;

    friend LiftedAction cotangent_lift(const ActionSpec& action);

private:
    ActionSpec source_;
    DarbouxChart phase_chart_;
    std::vector<Expr> components_;
};

LiftedAction cotangent_lift(const ActionSpec& action);

// X^# for the Lie-algebra direction (coefficients against the group's
// parameter basis), as a vector field on the phase chart.
VectorFieldExpr fundamental_vector_field(const LiftedAction& lifted, const Vec& direction);

// One component per group factor: <mu, X_j> = lambda(X_j^#).
std::vector<Expr> moment_map_of_lift(const LiftedAction& lifted);

// sup over samples of || i_{X^#} dlambda + d mu_X ||_max for the direction;
// zero (to roundoff) for every cotangent lift.
double moment_closure_residual(const LiftedAction& lifted, const Vec& direction,
                               std::span<const Vec> samples);

struct LiftInvarianceOptions {
    int param_samples = 32;
    int point_samples = 64;
    double tol = 1e-9;
    double param_range = 1.0;  // non-periodic factors sampled in [-range, range]
    Box point_box;             // defaults to [-1.5, 1.5]^{2m}
    std::uint64_t seed = 90210;
};

struct LiftInvarianceReport {
    double max_pullback_residual = 0.0;
    double max_sympl_residual = 0.0;
    double tol = 0.0;
    bool pass = false;
    int param_samples = 0;
    int point_samples = 0;
};

// Lemma-grade check: every sampled group element preserves lambda and Omega.
LiftInvarianceReport verify_lift_invariance(const LiftedAction& lifted,
                                            const LiftInvarianceOptions& opts = {});
// Same residuals for a user-supplied phase-space map (raw-map checks).
LiftInvarianceReport verify_phase_map_invariance(const SmoothMap& map, const DarbouxChart& chart,
                                                 std::span<const Vec> samples, double tol);

}  // namespace cotlift
