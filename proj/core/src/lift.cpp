#include "cotlift/lift.hpp"

#include <cmath>
#include <numbers>

namespace cotlift {

namespace {

// Determinant of a matrix of expressions by cofactor expansion.
Expr symbolic_det(const std::vector<std::vector<Expr>>& m) {
    const int n = static_cast<int>(m.size());
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    Expr det = Expr::constant(0.0);
    for (int j = 0; j < n; ++j) {
        std::vector<std::vector<Expr>> minor;
        minor.reserve(n - 1);
        for (int r = 1; r < n; ++r) {
            std::vector<Expr> row;
            row.reserve(n - 1);
            for (int c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        Expr term = m[0][j] * symbolic_det(minor);
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
}

// adj(M)_{ij} = (-1)^{i+j} * minor_{ji}.
std::vector<std::vector<Expr>> symbolic_adjugate(const std::vector<std::vector<Expr>>& m) {
    const int n = static_cast<int>(m.size());
    std::vector<std::vector<Expr>> adj(n, std::vector<Expr>(n));
    if (n == 1) {
        adj[0][0] = Expr::constant(1.0);
        return adj;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            std::vector<std::vector<Expr>> minor;
            for (int r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<Expr> row;
                for (int c = 0; c < n; ++c)
                    if (c != i) row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            Expr cof = symbolic_det(minor);
            adj[i][j] = ((i + j) % 2 == 0) ? cof : -cof;
        }
    }
    return adj;
}

}  // namespace

LiftedAction cotangent_lift(const ActionSpec& action) {
    const int m = action.base_dim();
    if (m > 4)
        throw ValidationError(
            "cotangent_lift builds closed-form inverse-transpose Jacobians for base dimension <= 4");

    std::vector<bool> periodic;
    for (int i = 0; i < m; ++i) periodic.push_back(action.base_periodic(i));
    DarbouxChart phase = DarbouxChart::cotangent(action.base_positions(), periodic);

    // Base Jacobian entries J_{ij} = d rho_i / d q_j as expressions.
    std::vector<std::vector<Expr>> jac(m, std::vector<Expr>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            jac[i][j] = action.components()[i].diff(action.base_positions()[j]);

    Expr det = symbolic_det(jac);
    auto adj = symbolic_adjugate(jac);

    // Numeric invertibility probe over sampled (g, q).
    {
        Rng rng(411);
        std::vector<std::string> vars = action.base_positions();
        for (const auto& f : action.group().factors) vars.push_back(f.param);
        CompiledExpr det_prog(det, vars);
        const int d = action.group().dim();
        for (int s = 0; s < 64; ++s) {
            Vec full(m + d);
            for (int i = 0; i < m; ++i)
                full[i] = action.base_periodic(i) ? rng.uniform(0.0, 2.0 * std::numbers::pi)
                                                  : rng.symmetric();
            for (int i = 0; i < d; ++i)
                full[m + i] = action.group().factors[i].periodic
                                  ? rng.uniform(0.0, 2.0 * std::numbers::pi)
                                  : rng.symmetric();
            double v = det_prog.eval({full.data(), static_cast<std::size_t>(full.size())});
            if (std::abs(v) < 1e-10)
                throw NonInvertibleJacobianError(
                    "base Jacobian is numerically singular at a sampled (g, q)");
        }
    }

    LiftedAction lifted;
    lifted.source_ = action;
    lifted.phase_chart_ = phase;
    lifted.components_ = action.components();
    Expr det_inv = pow(det, -1);
    for (int i = 0; i < m; ++i) {
        // p'_i = sum_j (J^{-T})_{ij} p_j = det^{-1} * sum_j adj(J)_{ji} p_j
        Expr s = Expr::constant(0.0);
        for (int j = 0; j < m; ++j) s = s + adj[j][i] * Expr::variable(phase.momenta()[j]);
        lifted.components_.push_back(det_inv * s);
    }
    return lifted;
}

ExprMap LiftedAction::map_at(const Vec& params) const {
    std::map<std::string, Expr, std::less<>> repl;
    for (int j = 0; j < source_.group().dim(); ++j)
        repl.emplace(source_.group().factors[j].param, Expr::constant(params[j]));
    std::vector<Expr> comps;
    comps.reserve(components_.size());
    for (const Expr& c : components_) comps.push_back(c.substitute(repl));
    return ExprMap(std::move(comps), phase_chart_.coords());
}

VectorFieldExpr fundamental_vector_field(const LiftedAction& lifted, const Vec& direction) {
    const auto& group = lifted.source().group();
    if (direction.size() != group.dim())
        throw ValidationError("direction dimension must match the group dimension");
    std::map<std::string, Expr, std::less<>> at_identity;
    for (const auto& f : group.factors) at_identity.emplace(f.param, Expr::constant(0.0));

    VectorFieldExpr field;
    field.chart = lifted.phase_chart();
    field.components.reserve(lifted.components().size());
    for (const Expr& comp : lifted.components()) {
        Expr sum = Expr::constant(0.0);
        for (int j = 0; j < group.dim(); ++j) {
            if (direction[j] == 0.0) continue;
            sum = sum + Expr::constant(direction[j]) *
                            comp.diff(group.factors[j].param).substitute(at_identity);
        }
        field.components.push_back(Expr::constant(kFundamentalFieldSign) * sum);
    }
    return field;
}

std::vector<Expr> moment_map_of_lift(const LiftedAction& lifted) {
    const auto& chart = lifted.phase_chart();
    const int m = chart.dof();
    const int d = lifted.source().group().dim();
    std::vector<Expr> mu;
    mu.reserve(d);
    for (int j = 0; j < d; ++j) {
        Vec dir = Vec::Zero(d);
        dir[j] = 1.0;
        VectorFieldExpr field = fundamental_vector_field(lifted, dir);
        Expr s = Expr::constant(0.0);
        for (int i = 0; i < m; ++i)
            s = s + Expr::variable(chart.momenta()[i]) * field.components[i];
        mu.push_back(s);
    }
    return mu;
}

double moment_closure_residual(const LiftedAction& lifted, const Vec& direction,
                               std::span<const Vec> samples) {
    const auto& chart = lifted.phase_chart();
    const int m = chart.dof();
    VectorFieldExpr field = fundamental_vector_field(lifted, direction);

    // mu_X = lambda(X^#)
    Expr mu = Expr::constant(0.0);
    for (int i = 0; i < m; ++i)
        mu = mu + Expr::variable(chart.momenta()[i]) * field.components[i];
    std::vector<Expr> grad = gradient(mu, chart.coords());

    auto field_prog = compile_all(field.components, chart.coords());
    auto grad_prog = compile_all(grad, chart.coords());

    // dlambda = sum_i dy_i ^ dx_i, as a matrix W = -Omega; the 1-form
    // i_X dlambda has components (X^T W)_j.
    const Mat w = -standard_omega(m);
    double worst = 0.0;
    for (const Vec& z : samples) {
        std::span<const double> zs(z.data(), static_cast<std::size_t>(z.size()));
        Vec x(2 * m), dmu(2 * m);
        for (int i = 0; i < 2 * m; ++i) {
            x[i] = field_prog[i].eval(zs);
            dmu[i] = grad_prog[i].eval(zs);
        }
        Vec contraction = w.transpose() * x;  // components of i_X dlambda
        worst = std::max(worst, (contraction + dmu).cwiseAbs().maxCoeff());
    }
    return worst;
}

LiftInvarianceReport verify_phase_map_invariance(const SmoothMap& map, const DarbouxChart& chart,
                                                 std::span<const Vec> samples, double tol) {
    LiftInvarianceReport report;
    report.tol = tol;
    report.point_samples = static_cast<int>(samples.size());
    std::vector<Expr> lambda = liouville_form(chart);
    MapCheckReport pull = pullback_form_residual(map, lambda, chart, samples, tol);
    MapCheckReport symp = is_symplectomorphism(map, samples, tol);
    report.max_pullback_residual = pull.max_residual;
    report.max_sympl_residual = symp.max_residual;
    report.pass = pull.pass && symp.pass;
    return report;
}

LiftInvarianceReport verify_lift_invariance(const LiftedAction& lifted,
                                            const LiftInvarianceOptions& opts) {
    const auto& chart = lifted.phase_chart();
    const auto& group = lifted.source().group();
    Box box = opts.point_box;
    if (box.lo.size() == 0) box = Box::cube(chart.dim(), -1.5, 1.5);
    std::vector<Vec> points = sample_box(box, opts.point_samples, opts.seed);

    Rng rng(opts.seed ^ 0x9e3779b97f4a7c15ull);
    LiftInvarianceReport report;
    report.tol = opts.tol;
    report.param_samples = opts.param_samples;
    report.point_samples = opts.point_samples;
    report.pass = true;
    for (int s = 0; s < opts.param_samples; ++s) {
        Vec params(group.dim());
        for (int j = 0; j < group.dim(); ++j)
            params[j] = group.factors[j].periodic
                            ? rng.uniform(0.0, 2.0 * std::numbers::pi)
                            : rng.uniform(-opts.param_range, opts.param_range);
        ExprMap map = lifted.map_at(params);
        LiftInvarianceReport one = verify_phase_map_invariance(map, chart, points, opts.tol);
        report.max_pullback_residual =
            std::max(report.max_pullback_residual, one.max_pullback_residual);
        report.max_sympl_residual = std::max(report.max_sympl_residual, one.max_sympl_residual);
        report.pass = report.pass && one.pass;
    }
    return report;
}

}  // namespace cotlift
