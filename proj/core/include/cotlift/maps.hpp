#pragma once

#include <memory>
#include <vector>

#include "cotlift/chart.hpp"
#include "cotlift/compiled.hpp"

namespace cotlift {

// A smooth map R^m -> R^k with analytic first and (optionally) second
// derivatives. All residual checks in the library run over this interface so
// symbolic maps and numerically-constructed maps (group averages, lifted
// conjugations) go through the same code paths.
class SmoothMap {
public:
    virtual ~SmoothMap() = default;

    virtual int dim_in() const = 0;
    virtual int dim_out() const = 0;

    virtual Vec value(const Vec& x) const = 0;
    // dim_out x dim_in.
    virtual Mat jacobian(const Vec& x) const = 0;
    // One dim_in x dim_in matrix per output component. Maps that cannot
    // provide second derivatives throw.
    virtual std::vector<Mat> hessian(const Vec& x) const;
};

// Map given by expressions over an ordered variable list. Partials are exact
// (symbolic then compiled), so residuals on exact identities reach roundoff.
class ExprMap final : public SmoothMap {
public:
    ExprMap(std::vector<Expr> components, std::vector<std::string> variables);

    int dim_in() const override { return static_cast<int>(variables_.size()); }
    int dim_out() const override { return static_cast<int>(components_.size()); }

    Vec value(const Vec& x) const override;
    Mat jacobian(const Vec& x) const override;
    std::vector<Mat> hessian(const Vec& x) const override;

    const std::vector<Expr>& components() const { return components_; }
    const std::vector<std::string>& variables() const { return variables_; }

private:
    std::vector<Expr> components_;
    std::vector<std::string> variables_;
    std::vector<CompiledExpr> value_prog_;
    std::vector<CompiledExpr> jac_prog_;   // row-major k x m
    std::vector<CompiledExpr> hess_prog_;  // component-major k x m x m
};

class IdentityMap final : public SmoothMap {
public:
    explicit IdentityMap(int dim) : dim_(dim) {}
    int dim_in() const override { return dim_; }
    int dim_out() const override { return dim_; }
    Vec value(const Vec& x) const override { return x; }
    Mat jacobian(const Vec&) const override { return Mat::Identity(dim_, dim_); }
    std::vector<Mat> hessian(const Vec&) const override {
        return std::vector<Mat>(dim_, Mat::Zero(dim_, dim_));
    }

private:
    int dim_;
};

// Cotangent lift of a base diffeomorphism phi: q -> phi(q):
//   (q, p) -> (phi(q), J_phi(q)^{-T} p).
// Value needs first derivatives of phi; the Jacobian needs second ones.
class CotangentLiftMap final : public SmoothMap {
public:
    // det threshold guards the fiber solve; below it the Jacobian is treated
    // as singular and the lift refuses the point.
    explicit CotangentLiftMap(std::shared_ptr<const SmoothMap> base,
                              double det_threshold = 1e-12);

    int dim_in() const override { return 2 * base_->dim_in(); }
    int dim_out() const override { return 2 * base_->dim_in(); }

    Vec value(const Vec& z) const override;
    Mat jacobian(const Vec& z) const override;

    const SmoothMap& base() const { return *base_; }

private:
    std::shared_ptr<const SmoothMap> base_;
    double det_threshold_;
};

class NonInvertibleJacobianError : public Error {
public:
    using Error::Error;
};

}  // namespace cotlift
