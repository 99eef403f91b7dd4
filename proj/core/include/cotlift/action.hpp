#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cotlift/chart.hpp"
#include "cotlift/compiled.hpp"
#include "cotlift/sampling.hpp"

namespace cotlift {

// Abelian parameter groups: products of circle and real-line factors.
// Circle/torus factors are 2*pi-periodic; group composition is parameter
// addition and inversion is negation.
struct GroupSpec {
    struct Factor {
        std::string param;
        bool periodic = false;
    };
    std::vector<Factor> factors;

    int dim() const { return static_cast<int>(factors.size()); }
    std::vector<std::string> param_names() const;
    bool all_periodic() const;

    static GroupSpec circle(std::string param = "theta");
    static GroupSpec torus(std::vector<std::string> params);
    static GroupSpec real_line(std::vector<std::string> params);
    // Product group: concatenated factors.
    static GroupSpec product(const GroupSpec& a, const GroupSpec& b);
};

// Smooth action of an abelian group on a base chart, with analytic
// derivatives in both the point and the parameters. Numeric implementations
// (test oracles built from a known conjugacy) subclass this directly;
// expression-defined actions use ActionSpec.
class Action {
public:
    virtual ~Action() = default;

    virtual const GroupSpec& group() const = 0;
    virtual int base_dim() const = 0;
    virtual bool base_periodic(int i) const = 0;

    virtual Vec apply(const Vec& params, const Vec& q) const = 0;
    virtual Mat jacobian_q(const Vec& params, const Vec& q) const = 0;
    // One base_dim x base_dim matrix per output component.
    virtual std::vector<Mat> hessian_q(const Vec& params, const Vec& q) const = 0;
    // base_dim x group dim, d(apply)/d(params).
    virtual Mat param_derivative(const Vec& params, const Vec& q) const = 0;
};

struct ActionValidation {
    double tol_identity = 1e-10;
    double tol_composition = 1e-9;
    int samples = 32;
    std::uint64_t seed = 7041;
    bool skip = false;
};

// Expression-defined action: m components over base variables plus group
// parameters. Construction checks the action axioms by sampling (identity
// parameter acts as identity; composition law at sampled parameter pairs).
class ActionSpec final : public Action {
public:
    static ActionSpec make(GroupSpec group, std::vector<std::string> base_positions,
                           std::vector<bool> base_periodic, std::vector<Expr> components,
                           const ActionValidation& validation = {});

    const GroupSpec& group() const override { return group_; }
    int base_dim() const override { return static_cast<int>(base_positions_.size()); }
    bool base_periodic(int i) const override { return base_periodic_[i]; }

    const std::vector<std::string>& base_positions() const { return base_positions_; }
    const std::vector<Expr>& components() const { return components_; }

    Vec apply(const Vec& params, const Vec& q) const override;
    Mat jacobian_q(const Vec& params, const Vec& q) const override;
    std::vector<Mat> hessian_q(const Vec& params, const Vec& q) const override;
    Mat param_derivative(const Vec& params, const Vec& q) const override;

    // Components with the parameters substituted by constants: a plain map
    // of the base chart.
    std::vector<Expr> components_at(const Vec& params) const;

private:
    GroupSpec group_;
    std::vector<std::string> base_positions_;
    std::vector<bool> base_periodic_;
    std::vector<Expr> components_;
    // variable order: base positions then parameters
    std::vector<std::string> variables_;
    std::vector<CompiledExpr> value_prog_;
    std::vector<CompiledExpr> jac_prog_;    // m x m
    std::vector<CompiledExpr> hess_prog_;   // m x m x m
    std::vector<CompiledExpr> param_prog_;  // m x d

    Vec pack(const Vec& params, const Vec& q) const;
};

// Distance between base points, wrapping 2*pi-periodic coordinates.
double base_distance(const Action& action, const Vec& a, const Vec& b);
double wrap_angle(double a);  // to (-pi, pi]

}  // namespace cotlift
