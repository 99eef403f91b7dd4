#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "cotlift/chart.hpp"
#include "cotlift/maps.hpp"
#include "cotlift/quadrature.hpp"
#include "cotlift/singularity.hpp"

namespace cotlift {

class CloudTooSpreadError : public Error {
public:
    using Error::Error;
};

// phi(x) = center of mass over the quadrature nodes g of rho1(g)^{-1}(rho2(g)(x)):
// Euclidean mean on line coordinates, per-coordinate circular mean on
// periodic ones (refusing when the node cloud leaves an open half-circle).
// Values and first/second derivatives come from the exact per-node chain rule,
// so downstream residuals see quadrature error only.
class AveragedMap final : public SmoothMap {
public:
    AveragedMap(std::shared_ptr<const Action> rho1, std::shared_ptr<const Action> rho2,
                GroupQuadrature quadrature);

    int dim_in() const override;
    int dim_out() const override { return dim_in(); }

    Vec value(const Vec& x) const override;
    Mat jacobian(const Vec& x) const override;
    std::vector<Mat> hessian(const Vec& x) const override;

    const GroupQuadrature& quadrature() const { return quad_; }

private:
    struct NodeData;
    void accumulate(const Vec& x, int order, Vec* val, Mat* jac, std::vector<Mat>* hess) const;

    std::shared_ptr<const Action> rho1_;
    std::shared_ptr<const Action> rho2_;
    GroupQuadrature quad_;
};

struct AveragingOptions {
    double closeness_bound = 0.2;     // C0 gate on the action distance
    double det_threshold = 1e-6;      // invertibility gate on phi
    int param_samples = 32;           // off-node group elements for residuals
    int point_samples = 256;          // base points for residuals
    int phase_samples = 256;          // phase points for lifted residuals
    double momentum_range = 1.0;      // fibers sampled in [-range, range]
    double tol = 1e-9;                // pass threshold for residual_sympl
    std::uint64_t seed = 5150;
};

struct ConjugationResult {
    std::shared_ptr<const SmoothMap> phi;

    // sup over sampled (g, x) of |rho1(g)(phi(x)) - phi(rho2(g)(x))|
    double residual_conj = 0.0;
    // same defect evaluated only at quadrature nodes (exact reindexing)
    double residual_node_equivariance = 0.0;
    // sup of the q-Jacobian defect of the conjugation (C1 defect)
    double residual_conj_c1 = 0.0;

    // filled by verify_equivalence_suite
    double residual_conj_lifted = 0.0;
    double residual_sympl = 0.0;
    double residual_moment = 0.0;

    // sampled distances between the two actions (metadata, not enforced)
    double action_c0_distance = 0.0;
    double action_c1_distance = 0.0;

    double min_jacobian_det = 0.0;
    // Jacobian-norm constant relating base and lifted conjugation defects.
    double lift_constant = 0.0;

    int quadrature_nodes = 0;
    std::uint64_t seed = 0;
};

// Runs the closeness gate, builds the averaged map, verifies invertibility on
// the sampled domain, and measures conjugation residuals. Throws
// HypothesisError when the actions are farther than the closeness bound,
// CloudTooSpreadError / NonInvertibleJacobianError from the construction.
ConjugationResult palais_average(std::shared_ptr<const Action> rho1,
                                 std::shared_ptr<const Action> rho2, const GroupQuadrature& quad,
                                 const Box& domain, const AveragingOptions& opts = {});

// Cotangent lift of a base conjugacy.
std::shared_ptr<const SmoothMap> lift_conjugation(std::shared_ptr<const SmoothMap> phi,
                                                  double det_threshold = 1e-12);

// Completes a ConjugationResult for a given phi: base + lifted conjugation
// residuals, symplecticity of the lift, and the moment-map match
// sup |mu_2 - mu_1 o phi_hat|.
ConjugationResult verify_equivalence_suite(std::shared_ptr<const Action> rho1,
                                           std::shared_ptr<const Action> rho2,
                                           std::shared_ptr<const SmoothMap> phi, const Box& domain,
                                           const AveragingOptions& opts = {});

// --- desk-scale leaf rigidity for elliptic 1-DOF blocks ---

struct LeafRigidityConfig {
    double window_halfwidth = 0.35;   // annulus of levels around c
    int annulus_levels = 5;
    int points_per_level = 48;
    int sympl_points = 24;
    double fd_step = 1e-5;            // FD step for the transported map's Jacobian
    double trace_tol = 1e-8;
    std::uint64_t seed = 31337;
};

struct LeafRigidityReport {
    double c = 0.0;
    double c_hat = 0.0;
    double action_value = 0.0;
    double residual_conj = 0.0;   // sup |Fhat(phi_c(z)) - m(F(z))|
    double residual_sympl = 0.0;  // FD symplecticity of phi_c on the annulus
    bool identity_shortcut = false;
    bool pass = false;
    double tol = 0.0;
};

// Matches the leaf {f = c} of a 1-DOF system to a leaf of fhat by equal
// enclosed area, transports along the flows (angle alignment from a common
// ray section), and reports conjugation/symplecticity residuals on an
// annulus. Throws HypothesisError when a non-elliptic critical point sits in
// the window.
LeafRigidityReport elliptic_leaf_rigidity_experiment(const Expr& f, const Expr& fhat,
                                                     const DarbouxChart& chart, double c,
                                                     const LeafRigidityConfig& config = {});

}  // namespace cotlift
