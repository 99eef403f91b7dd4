#include "cotlift/symplectic.hpp"

#include <cmath>

namespace cotlift {

VectorFieldExpr hamiltonian_vector_field(const Expr& f, const DarbouxChart& chart) {
    const int n = chart.dof();
    VectorFieldExpr field;
    field.chart = chart;
    field.components.reserve(2 * n);
    for (int i = 0; i < n; ++i) field.components.push_back(-f.diff(chart.momenta()[i]));
    for (int i = 0; i < n; ++i) field.components.push_back(f.diff(chart.positions()[i]));
    return field;
}

Expr poisson_bracket(const Expr& f, const Expr& g, const DarbouxChart& chart) {
    Expr sum = Expr::constant(0.0);
    for (int i = 0; i < chart.dof(); ++i) {
        const auto& x = chart.positions()[i];
        const auto& y = chart.momenta()[i];
        sum = sum + f.diff(x) * g.diff(y) - f.diff(y) * g.diff(x);
    }
    return sum;
}

InvolutionReport check_involution(const MomentMapSystem& system, std::span<const Vec> samples,
                                  double tol) {
    InvolutionReport report;
    report.tol = tol;
    const int n = system.size();
    const auto& coords = system.chart().coords();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Expr bracket = poisson_bracket(system.component(i), system.component(j),
                                           system.chart());
            CompiledExpr prog(bracket, coords);
            for (const Vec& p : samples) {
                double v = std::abs(prog.eval({p.data(), static_cast<std::size_t>(p.size())}));
                if (v > report.max_residual) {
                    report.max_residual = v;
                    report.worst_i = i;
                    report.worst_j = j;
                }
            }
        }
    }
    report.pass = report.max_residual <= tol;
    return report;
}

std::vector<Expr> liouville_form(const DarbouxChart& chart) {
    std::vector<Expr> lambda;
    lambda.reserve(chart.dim());
    for (int i = 0; i < chart.dof(); ++i) lambda.push_back(Expr::variable(chart.momenta()[i]));
    for (int i = 0; i < chart.dof(); ++i) lambda.push_back(Expr::constant(0.0));
    return lambda;
}

MapCheckReport is_symplectomorphism(const SmoothMap& map, std::span<const Vec> samples,
                                    double tol, double det_threshold) {
    if (map.dim_in() != map.dim_out() || map.dim_in() % 2 != 0)
        throw ValidationError("symplecticity check needs an even-dimensional self-map");
    const int n = map.dim_in() / 2;
    const Mat omega = standard_omega(n);
    MapCheckReport report;
    report.tol = tol;
    report.samples = static_cast<int>(samples.size());
    for (const Vec& p : samples) {
        Mat jac = map.jacobian(p);
        if (std::abs(jac.determinant()) < det_threshold) ++report.singular_jacobians;
        double r = (jac.transpose() * omega * jac - omega).cwiseAbs().maxCoeff();
        report.max_residual = std::max(report.max_residual, r);
    }
    report.pass = report.max_residual <= tol && report.singular_jacobians == 0;
    return report;
}

MapCheckReport pullback_form_residual(const SmoothMap& map, std::span<const Expr> form,
                                      const DarbouxChart& chart, std::span<const Vec> samples,
                                      double tol) {
    if (map.dim_in() != map.dim_out())
        throw ValidationError("pullback residual check needs a self-map");
    if (static_cast<int>(form.size()) != map.dim_out())
        throw ValidationError("form component count must match map output dimension");
    if (chart.dim() != map.dim_out())
        throw ValidationError("form chart must match map output dimension");
    std::vector<CompiledExpr> coeff = compile_all(form, chart.coords());
    MapCheckReport report;
    report.tol = tol;
    report.samples = static_cast<int>(samples.size());
    const int dim = map.dim_in();
    for (const Vec& x : samples) {
        Vec fx = map.value(x);
        Mat jac = map.jacobian(x);
        std::span<const double> at_fx(fx.data(), static_cast<std::size_t>(fx.size()));
        std::span<const double> at_x(x.data(), static_cast<std::size_t>(x.size()));
        // (phi^* form)_i = sum_j form_j(phi(x)) * J_{ji}(x)
        for (int i = 0; i < dim; ++i) {
            double pulled = 0.0;
            for (int j = 0; j < map.dim_out(); ++j) pulled += coeff[j].eval(at_fx) * jac(j, i);
            double base = coeff[i].eval(at_x);
            report.max_residual = std::max(report.max_residual, std::abs(pulled - base));
        }
    }
    report.pass = report.max_residual <= tol;
    return report;
}

}  // namespace cotlift
