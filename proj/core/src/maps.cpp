#include "cotlift/maps.hpp"

#include <cmath>

namespace cotlift {

std::vector<Mat> SmoothMap::hessian(const Vec&) const {
    throw Error("this map does not provide second derivatives");
}

ExprMap::ExprMap(std::vector<Expr> components, std::vector<std::string> variables)
    : components_(std::move(components)), variables_(std::move(variables)) {
    for (const Expr& c : components_) {
        for (const auto& v : c.free_variables()) {
            bool known = false;
            for (const auto& name : variables_) known = known || name == v;
            if (!known) throw UnboundVariableError(v);
        }
    }
    const int m = dim_in();
    value_prog_ = compile_all(components_, variables_);
    std::vector<Expr> jac;
    std::vector<Expr> hess;
    jac.reserve(components_.size() * m);
    for (const Expr& c : components_) {
        std::vector<Expr> grad;
        grad.reserve(m);
        for (int j = 0; j < m; ++j) grad.push_back(c.diff(variables_[j]));
        for (int j = 0; j < m; ++j) jac.push_back(grad[j]);
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) hess.push_back(grad[j].diff(variables_[k]));
    }
    jac_prog_ = compile_all(jac, variables_);
    hess_prog_ = compile_all(hess, variables_);
}

Vec ExprMap::value(const Vec& x) const {
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    Vec out(dim_out());
    for (int i = 0; i < dim_out(); ++i) out[i] = value_prog_[i].eval(xs);
    return out;
}

Mat ExprMap::jacobian(const Vec& x) const {
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    Mat out(dim_out(), dim_in());
    int idx = 0;
    for (int i = 0; i < dim_out(); ++i)
        for (int j = 0; j < dim_in(); ++j) out(i, j) = jac_prog_[idx++].eval(xs);
    return out;
}

std::vector<Mat> ExprMap::hessian(const Vec& x) const {
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    std::vector<Mat> out(dim_out(), Mat(dim_in(), dim_in()));
    int idx = 0;
    for (int i = 0; i < dim_out(); ++i)
        for (int j = 0; j < dim_in(); ++j)
            for (int k = 0; k < dim_in(); ++k) out[i](j, k) = hess_prog_[idx++].eval(xs);
    return out;
}

CotangentLiftMap::CotangentLiftMap(std::shared_ptr<const SmoothMap> base, double det_threshold)
    : base_(std::move(base)), det_threshold_(det_threshold) {
    if (base_->dim_in() != base_->dim_out())
        throw ValidationError("cotangent lift needs a self-map of the base");
}

Vec CotangentLiftMap::value(const Vec& z) const {
    const int m = base_->dim_in();
    Vec q = z.head(m);
    Vec p = z.tail(m);
    Mat jac = base_->jacobian(q);
    Eigen::PartialPivLU<Mat> lu(jac.transpose());
    double det = lu.determinant();
    if (std::abs(det) < det_threshold_)
        throw NonInvertibleJacobianError("base Jacobian numerically singular (|det|=" +
                                         std::to_string(std::abs(det)) + ")");
    Vec out(2 * m);
    out.head(m) = base_->value(q);
    out.tail(m) = lu.solve(p);
    return out;
}

Mat CotangentLiftMap::jacobian(const Vec& z) const {
    const int m = base_->dim_in();
    Vec q = z.head(m);
    Vec p = z.tail(m);
    Mat jac = base_->jacobian(q);
    std::vector<Mat> hess = base_->hessian(q);
    Eigen::PartialPivLU<Mat> lu(jac.transpose());
    double det = lu.determinant();
    if (std::abs(det) < det_threshold_)
        throw NonInvertibleJacobianError("base Jacobian numerically singular");

    // d/dq of J^{-T} p: column k is -J^{-T} (dJ^T/dq_k) J^{-T} p.
    Vec w = lu.solve(p);  // J^{-T} p
    Mat dfiber_dq(m, m);
    for (int k = 0; k < m; ++k) {
        Vec t(m);
        for (int a = 0; a < m; ++a) {
            double s = 0.0;
            for (int b = 0; b < m; ++b) s += hess[b](a, k) * w[b];
            t[a] = s;
        }
        dfiber_dq.col(k) = -lu.solve(t);
    }

    Mat out = Mat::Zero(2 * m, 2 * m);
    out.topLeftCorner(m, m) = jac;
    out.bottomLeftCorner(m, m) = dfiber_dq;
    out.bottomRightCorner(m, m) = lu.inverse();
    return out;
}

}  // namespace cotlift
