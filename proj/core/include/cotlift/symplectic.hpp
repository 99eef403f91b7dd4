#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cotlift/chart.hpp"
#include "cotlift/maps.hpp"

namespace cotlift {

// Sign convention used throughout: with Omega = sum_i dx_i ^ dy_i and
// i_X Omega = -df, the Hamiltonian field is X_f = (-df/dy, df/dx).
VectorFieldExpr hamiltonian_vector_field(const Expr& f, const DarbouxChart& chart);

// {f,g} = sum_i (df/dx_i dg/dy_i - df/dy_i dg/dx_i) = Omega(X_f, X_g).
Expr poisson_bracket(const Expr& f, const Expr& g, const DarbouxChart& chart);

struct InvolutionReport {
    double max_residual = 0.0;
    double tol = 0.0;
    bool pass = false;
    int worst_i = -1;
    int worst_j = -1;
};

InvolutionReport check_involution(const MomentMapSystem& system, std::span<const Vec> samples,
                                  double tol = 1e-9);

// Components of lambda = sum_i y_i dx_i against the (dx, dy) coordinate
// coframe: (y_1,...,y_n, 0,...,0).
std::vector<Expr> liouville_form(const DarbouxChart& chart);

struct MapCheckReport {
    double max_residual = 0.0;
    double tol = 0.0;
    bool pass = false;
    int samples = 0;
    // Points where the Jacobian was numerically singular (flagged, not fatal).
    int singular_jacobians = 0;
};

// Residual max over samples of ||J^T Omega J - Omega||_max for the map's
// exact Jacobian.
MapCheckReport is_symplectomorphism(const SmoothMap& map, std::span<const Vec> samples,
                                    double tol = 1e-9, double det_threshold = 1e-12);

// Residual of phi^* form - form, componentwise at samples. `form` has one
// coefficient expression per coordinate of the map's target chart.
MapCheckReport pullback_form_residual(const SmoothMap& map, std::span<const Expr> form,
                                      const DarbouxChart& chart, std::span<const Vec> samples,
                                      double tol = 1e-9);

}  // namespace cotlift
