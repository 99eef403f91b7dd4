#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cotlift/chart.hpp"
#include "cotlift/singularity.hpp"
#include "cotlift/spline.hpp"

namespace cotlift {

class NotInvariantError : public Error {
public:
    using Error::Error;
};

class NotReducibleError : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

struct S1InvarianceOptions {
    int point_samples = 64;
    int angle_samples = 16;
    double tol = 1e-9;
    double radius = 1.5;
    std::uint64_t seed = 61803;
};

struct S1InvarianceReport {
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// Residual sup over sampled (point, angles) of |f(R_theta z) - f(z)| where
// R_theta rotates every (x_i, y_i) block by its own sampled angle.
S1InvarianceReport s1_invariance_check(const Expr& f, const DarbouxChart& chart,
                                       const S1InvarianceOptions& opts = {});

struct ProfileOptions {
    int nodes = 257;
    int validation_samples = 128;
    double fit_tol = 1e-9;
    std::uint64_t seed = 27182;
};

struct RadialProfile {
    Vec s_nodes;        // r^2 sample points
    Vec f_values;
    CubicSpline fit;    // phi with f = phi(x^2 + y^2)
    double node_residual = 0.0;        // interpolation residual at nodes (roundoff)
    double validation_residual = 0.0;  // sup |f - phi(x^2+y^2)| off the ray
    bool monotone_past_zero = false;   // phi strictly increasing on (0, s_hi]
    double dphi_at_zero = 0.0;
};

// Samples f along the ray (r, 0) of a 1-DOF chart, fits phi(s) on
// s in [s_lo, s_hi], and validates against random off-ray points. Throws
// NotInvariantError when the validation residual exceeds 10x the fit
// tolerance (f was not a function of x^2 + y^2 after all).
RadialProfile radial_profile(const Expr& f, const DarbouxChart& chart, double s_lo, double s_hi,
                             const ProfileOptions& opts = {});

struct ReduceOptions {
    int fit_degree = 4;
    int fit_samples = 512;
    int holdout_samples = 128;
    double box_halfwidth = 1.2;
    double tol = 1e-9;
    double invariance_tol = 1e-9;
    std::uint64_t seed = 16180;
};

// Least-squares fit of one function against monomials I_1^a I_2^b.
struct InvariantFit {
    int degree = 0;
    Vec coefficients;  // ordered by (a, b), a + b <= degree, lexicographic
    double holdout_residual = 0.0;

    double coefficient(int a, int b) const;
    double eval(double i1, double i2) const;
    std::string to_string(const std::string& n1, const std::string& n2) const;
};

struct ReducedSystem {
    std::vector<InvariantFit> fits;          // one per component
    std::vector<S1InvarianceReport> invariance;  // per component, blockwise rotations
    // per component x block: true when the fit depends on I_b with vanishing
    // linear part (degenerate profile d phi/ds = 0 at 0)
    std::vector<std::vector<bool>> degenerate_blocks;
    double tol = 0.0;
    bool pass = false;
};

// Expresses each f_j of a 2-DOF system as a function of
// (I_1, I_2) = (x_1^2+y_1^2, x_2^2+y_2^2) by polynomial least squares with a
// held-out residual. Throws NotReducibleError when some component fails the
// blockwise S^1-invariance precondition.
ReducedSystem s1_reduce(const MomentMapSystem& system, const ReduceOptions& opts = {});

struct EvidenceItem {
    std::string check;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::string detail;
};

struct RigidityVerdict {
    enum class Outcome { Rigid, HypothesisFailed };
    Outcome outcome = Outcome::HypothesisFailed;
    // "nondegenerate-elliptic" (direct path) or "degenerate-s1-reduction"
    std::string path;
    std::string failing_clause;  // empty when rigid
    std::optional<SingularPointReport> origin_report;
    std::vector<EvidenceItem> evidence;
    std::vector<double> reduced_weights;  // elliptic normal form of reduced block
};

struct RigidityExperimentOptions {
    ClassifyOptions classify;
    ProfileOptions profile;
    ReduceOptions reduce;
    S1InvarianceOptions invariance;
    double block_tol = 1e-8;
    double weights_tol = 1e-6;
};

// Verdict pipeline for a 2-DOF system with an isolated singularity at the
// origin: RIGID via the all-elliptic classification, or RIGID via the
// S^1-invariant degenerate route (one elliptic block + one degenerate
// invariant block with a strictly increasing radial profile), or
// HYPOTHESIS-FAILED naming the failing clause. Every evidence item records
// the check, its residual and its tolerance so the chain can be re-validated.
RigidityVerdict degenerate_rigidity_experiment(const MomentMapSystem& system,
                                               const RigidityExperimentOptions& opts = {});

}  // namespace cotlift
