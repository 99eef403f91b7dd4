#include "cotlift/reduction.hpp"

#include <Eigen/QR>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cotlift/compiled.hpp"
#include "cotlift/sampling.hpp"

namespace cotlift {

S1InvarianceReport s1_invariance_check(const Expr& f, const DarbouxChart& chart,
                                       const S1InvarianceOptions& opts) {
    const int n = chart.dof();
    CompiledExpr prog(f, chart.coords());
    Rng rng(opts.seed);
    S1InvarianceReport report;
    report.tol = opts.tol;
    Vec z(2 * n), rotated(2 * n);
    for (int p = 0; p < opts.point_samples; ++p) {
        for (int i = 0; i < 2 * n; ++i) z[i] = rng.uniform(-opts.radius, opts.radius);
        double base = prog.eval({z.data(), static_cast<std::size_t>(z.size())});
        for (int a = 0; a < opts.angle_samples; ++a) {
            for (int b = 0; b < n; ++b) {
                double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
                double ct = std::cos(theta), st = std::sin(theta);
                double x = z[b], y = z[n + b];
                rotated[b] = ct * x - st * y;
                rotated[n + b] = st * x + ct * y;
            }
            double v = prog.eval({rotated.data(), static_cast<std::size_t>(rotated.size())});
            report.residual = std::max(report.residual, std::abs(v - base));
        }
    }
    report.pass = report.residual <= opts.tol;
    return report;
}

RadialProfile radial_profile(const Expr& f, const DarbouxChart& chart, double s_lo, double s_hi,
                             const ProfileOptions& opts) {
    if (chart.dof() != 1) throw ValidationError("radial_profile expects a 1-DOF chart");
    if (!(s_hi > s_lo) || s_lo < 0.0) throw ValidationError("bad radial annulus");
    if (opts.nodes < 8) throw ValidationError("radial_profile needs at least 8 nodes");

    CompiledExpr prog(f, chart.coords());
    auto feval = [&](double x, double y) {
        double pt[2] = {x, y};
        return prog.eval({pt, 2});
    };

    RadialProfile profile;
    profile.s_nodes = Vec::LinSpaced(opts.nodes, s_lo, s_hi);
    profile.f_values = Vec(opts.nodes);
    for (int i = 0; i < opts.nodes; ++i)
        profile.f_values[i] = feval(std::sqrt(profile.s_nodes[i]), 0.0);
    profile.fit = CubicSpline(profile.s_nodes, profile.f_values);

    for (int i = 0; i < opts.nodes; ++i) {
        double r = std::abs(profile.fit.value(profile.s_nodes[i]) - profile.f_values[i]);
        profile.node_residual = std::max(profile.node_residual, r);
    }

    Rng rng(opts.seed);
    for (int k = 0; k < opts.validation_samples; ++k) {
        double s = rng.uniform(s_lo, s_hi);
        double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        double r = std::sqrt(s);
        double v = feval(r * std::cos(theta), r * std::sin(theta));
        profile.validation_residual =
            std::max(profile.validation_residual, std::abs(v - profile.fit.value(s)));
    }
    if (profile.validation_residual > 10.0 * opts.fit_tol)
        throw NotInvariantError("off-ray validation residual " +
                                std::to_string(profile.validation_residual) +
                                " exceeds 10x fit tolerance (not a function of x^2+y^2)");

    profile.dphi_at_zero = profile.fit.derivative(s_lo);
    double eps = s_lo + 1e-6 * (s_hi - s_lo);
    profile.monotone_past_zero = profile.fit.strictly_increasing(eps, s_hi);
    return profile;
}

namespace {

std::vector<std::pair<int, int>> monomials(int degree) {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b) out.emplace_back(a, b);
    return out;
}

}  // namespace

double InvariantFit::coefficient(int a, int b) const {
    auto mono = monomials(degree);
    for (std::size_t i = 0; i < mono.size(); ++i)
        if (mono[i].first == a && mono[i].second == b) return coefficients[i];
    return 0.0;
}

double InvariantFit::eval(double i1, double i2) const {
    auto mono = monomials(degree);
    double v = 0.0;
    for (std::size_t i = 0; i < mono.size(); ++i)
        v += coefficients[i] * pow_int(i1, mono[i].first) * pow_int(i2, mono[i].second);
    return v;
}

std::string InvariantFit::to_string(const std::string& n1, const std::string& n2) const {
    auto mono = monomials(degree);
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    for (std::size_t i = 0; i < mono.size(); ++i) {
        double c = coefficients[i];
        if (std::abs(c) < 1e-9) continue;
        if (!first) os << " + ";
        first = false;
        os << c;
        if (mono[i].first > 0) os << "*" << n1 << "^" << mono[i].first;
        if (mono[i].second > 0) os << "*" << n2 << "^" << mono[i].second;
    }
    if (first) os << "0";
    return os.str();
}

ReducedSystem s1_reduce(const MomentMapSystem& system, const ReduceOptions& opts) {
    if (system.chart().dof() != 2)
        throw ValidationError("s1_reduce expects a 2-DOF (4-dimensional) system");

    ReducedSystem reduced;
    reduced.tol = opts.tol;

    // Precondition: every component is invariant under independent rotations
    // of the two oscillator blocks.
    for (int j = 0; j < system.size(); ++j) {
        S1InvarianceOptions inv_opts;
        inv_opts.tol = opts.invariance_tol;
        inv_opts.seed = opts.seed + j;
        reduced.invariance.push_back(
            s1_invariance_check(system.component(j), system.chart(), inv_opts));
        if (!reduced.invariance.back().pass)
            throw NotReducibleError("component " + std::to_string(j) +
                                    " is not blockwise S^1-invariant (residual " +
                                    std::to_string(reduced.invariance.back().residual) + ")");
    }

    auto mono = monomials(opts.fit_degree);
    const int cols = static_cast<int>(mono.size());
    Box box = Box::cube(4, -opts.box_halfwidth, opts.box_halfwidth);
    auto fit_points = sample_box(box, opts.fit_samples, opts.seed);
    auto holdout_points = sample_box(box, opts.holdout_samples, opts.seed + 99);

    auto invariants = [](const Vec& z) {
        return std::pair<double, double>{z[0] * z[0] + z[2] * z[2], z[1] * z[1] + z[3] * z[3]};
    };

    Mat a(opts.fit_samples, cols);
    for (int r = 0; r < opts.fit_samples; ++r) {
        auto [i1, i2] = invariants(fit_points[r]);
        for (int c = 0; c < cols; ++c)
            a(r, c) = pow_int(i1, mono[c].first) * pow_int(i2, mono[c].second);
    }
    Eigen::ColPivHouseholderQR<Mat> qr(a);

    reduced.pass = true;
    for (int j = 0; j < system.size(); ++j) {
        CompiledExpr prog(system.component(j), system.chart().coords());
        Vec rhs(opts.fit_samples);
        for (int r = 0; r < opts.fit_samples; ++r) {
            const Vec& z = fit_points[r];
            rhs[r] = prog.eval({z.data(), static_cast<std::size_t>(z.size())});
        }
        InvariantFit fit;
        fit.degree = opts.fit_degree;
        fit.coefficients = qr.solve(rhs);
        for (int h = 0; h < opts.holdout_samples; ++h) {
            const Vec& z = holdout_points[h];
            auto [i1, i2] = invariants(z);
            double v = prog.eval({z.data(), static_cast<std::size_t>(z.size())});
            fit.holdout_residual = std::max(fit.holdout_residual, std::abs(v - fit.eval(i1, i2)));
        }
        reduced.pass = reduced.pass && fit.holdout_residual <= opts.tol;

        std::vector<bool> degenerate(2, false);
        // degenerate profile in block b: fit depends on I_b but has no linear
        // I_b term
        auto depends = [&](int b) {
            for (std::size_t i = 0; i < mono.size(); ++i) {
                int power = b == 0 ? mono[i].first : mono[i].second;
                if (power > 0 && std::abs(fit.coefficients[i]) > 1e-7) return true;
            }
            return false;
        };
        double lin1 = fit.coefficient(1, 0);
        double lin2 = fit.coefficient(0, 1);
        degenerate[0] = depends(0) && std::abs(lin1) < 1e-7;
        degenerate[1] = depends(1) && std::abs(lin2) < 1e-7;
        reduced.degenerate_blocks.push_back(degenerate);
        reduced.fits.push_back(std::move(fit));
    }
    return reduced;
}

namespace {

DarbouxChart block_chart(const DarbouxChart& chart, int block) {
    return DarbouxChart::make({chart.positions()[block]}, {chart.momenta()[block]});
}

// Does f depend on block b's coordinates? (sampled gradient test)
bool depends_on_block(const Expr& f, const DarbouxChart& chart, int block, std::uint64_t seed) {
    Expr dx = f.diff(chart.positions()[block]);
    Expr dy = f.diff(chart.momenta()[block]);
    CompiledExpr px(dx, chart.coords());
    CompiledExpr py(dy, chart.coords());
    Rng rng(seed);
    Vec z(chart.dim());
    for (int s = 0; s < 16; ++s) {
        for (int i = 0; i < chart.dim(); ++i) z[i] = rng.uniform(-1.3, 1.3);
        std::span<const double> zs(z.data(), static_cast<std::size_t>(z.size()));
        if (std::abs(px.eval(zs)) > 1e-10 || std::abs(py.eval(zs)) > 1e-10) return true;
    }
    return false;
}

Mat block_hessian(const Expr& f, const DarbouxChart& chart, int block) {
    std::vector<std::string> vars = {chart.positions()[block], chart.momenta()[block]};
    auto h = hessian(f, vars);
    VarBinding origin = chart.bind(Vec::Zero(chart.dim()));
    Mat out(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out(i, j) = eval(h[i][j], origin);
    return out;
}

}  // namespace

RigidityVerdict degenerate_rigidity_experiment(const MomentMapSystem& system,
                                               const RigidityExperimentOptions& opts) {
    if (system.chart().dof() != 2)
        throw ValidationError(
            "the degenerate rigidity experiment handles 2-DOF systems; larger systems need the "
            "(n-1)-fold reduction chain, which is not implemented");

    RigidityVerdict verdict;
    Vec origin = Vec::Zero(4);

    auto report = classify_point(system, origin, opts.classify);
    if (!report) {
        verdict.failing_clause = "the origin is a regular point of the system";
        return verdict;
    }
    verdict.origin_report = *report;

    auto push = [&](std::string check, double residual, double tol, bool pass,
                    std::string detail) {
        verdict.evidence.push_back(
            {std::move(check), residual, tol, pass, std::move(detail)});
        return pass;
    };

    if (report->status == NondegeneracyResult::Status::NonDegenerate) {
        const auto& wt = *report->williamson;
        std::ostringstream os;
        os << "(" << wt.k_e << "," << wt.k_h << "," << wt.k_f << ") at rank " << report->rank;
        bool elliptic = wt.k_h == 0 && wt.k_f == 0;
        push("origin-classification", 0.0, 0.0, elliptic, os.str());
        if (elliptic) {
            verdict.outcome = RigidityVerdict::Outcome::Rigid;
            verdict.path = "nondegenerate-elliptic";
            return verdict;
        }
        verdict.failing_clause = wt.k_h > 0
                                     ? "non-degenerate origin contains a hyperbolic block"
                                     : "non-degenerate origin contains a focus-focus block";
        return verdict;
    }

    verdict.path = "degenerate-s1-reduction";
    push("origin-degenerate", 0.0, 0.0, true, report->status_reason);

    // Identify the degenerate component by its vanishing full Hessian.
    VarBinding at_origin = system.chart().bind(origin);
    std::vector<double> hessian_norm(2, 0.0);
    for (int j = 0; j < 2; ++j) {
        auto h = hessian(system.component(j), system.chart().coords());
        double norm = 0.0;
        for (const auto& row : h)
            for (const auto& e : row) norm = std::max(norm, std::abs(eval(e, at_origin)));
        hessian_norm[j] = norm;
    }
    int f_deg = -1, f_ell = -1;
    for (int j = 0; j < 2; ++j) {
        if (hessian_norm[j] <= opts.block_tol) f_deg = j;
    }
    if (f_deg < 0) {
        verdict.failing_clause =
            "origin is degenerate but no component has a vanishing quadratic part (desk-scale "
            "pipeline expects one degenerate component)";
        return verdict;
    }
    f_ell = 1 - f_deg;
    if (hessian_norm[f_ell] <= opts.block_tol) {
        verdict.failing_clause = "both components are degenerate at the origin; the hypothesis "
                                 "needs n-1 elliptic components";
        push("elliptic-component-present", 0.0, opts.block_tol, false, "");
        return verdict;
    }

    // The components must split across the two oscillator blocks.
    bool ell_on[2], deg_on[2];
    for (int b = 0; b < 2; ++b) {
        ell_on[b] = depends_on_block(system.component(f_ell), system.chart(), b, 1234 + b);
        deg_on[b] = depends_on_block(system.component(f_deg), system.chart(), b, 4321 + b);
    }
    int b_ell = ell_on[0] && !ell_on[1] ? 0 : (!ell_on[0] && ell_on[1] ? 1 : -1);
    if (b_ell < 0 || deg_on[b_ell] || !deg_on[1 - b_ell]) {
        verdict.failing_clause =
            "components do not split into disjoint oscillator blocks (desk-scale hypothesis)";
        push("block-split", 0.0, 0.0, false, "");
        return verdict;
    }
    int b_deg = 1 - b_ell;

    // Elliptic block check on the non-degenerate component.
    Mat h_ell = block_hessian(system.component(f_ell), system.chart(), b_ell);
    std::vector<double> block_weights;
    try {
        block_weights = s1_weights_from_hessian(h_ell, opts.classify.tol);
        std::ostringstream os;
        os << "weight " << block_weights[0];
        push("elliptic-block", 0.0, opts.classify.tol, true, os.str());
    } catch (const NotEllipticError& e) {
        push("elliptic-block", 0.0, opts.classify.tol, false, e.what());
        verdict.failing_clause = std::string("component ") + std::to_string(f_ell) +
                                 " is not an elliptic block: " + e.what();
        return verdict;
    }

    // S^1 invariance of the degenerate component.
    S1InvarianceReport inv = s1_invariance_check(system.component(f_deg), system.chart(),
                                                 opts.invariance);
    if (!push("s1-invariance", inv.residual, inv.tol, inv.pass, "")) {
        verdict.failing_clause = "degenerate component is not S^1-invariant";
        return verdict;
    }

    // Radial profile of the degenerate component on its block.
    DarbouxChart bchart = block_chart(system.chart(), b_deg);
    std::map<std::string, Expr, std::less<>> zero_other;
    zero_other.emplace(system.chart().positions()[b_ell], Expr::constant(0.0));
    zero_other.emplace(system.chart().momenta()[b_ell], Expr::constant(0.0));
    Expr f_block = system.component(f_deg).substitute(zero_other);
    RadialProfile profile;
    try {
        profile = radial_profile(f_block, bchart, 0.0, 2.0, opts.profile);
    } catch (const NotInvariantError& e) {
        push("radial-profile", 0.0, opts.profile.fit_tol, false, e.what());
        verdict.failing_clause = e.what();
        return verdict;
    }
    push("radial-profile-validation", profile.validation_residual, 10.0 * opts.profile.fit_tol,
         profile.validation_residual <= 10.0 * opts.profile.fit_tol, "");
    if (!push("profile-monotone-past-zero", 0.0, 0.0, profile.monotone_past_zero,
              "d phi/ds(0) = " + std::to_string(profile.dphi_at_zero))) {
        verdict.failing_clause =
            "radial profile is not strictly increasing past zero; reduced block is not "
            "elliptic-like";
        return verdict;
    }

    // Reduction to functions of the oscillator invariants.
    ReducedSystem reduced;
    try {
        reduced = s1_reduce(system, opts.reduce);
    } catch (const NotReducibleError& e) {
        push("s1-reduce", 0.0, opts.reduce.tol, false, e.what());
        verdict.failing_clause = e.what();
        return verdict;
    }
    double worst_fit = 0.0;
    for (const auto& fit : reduced.fits) worst_fit = std::max(worst_fit, fit.holdout_residual);
    if (!push("reduced-fit", worst_fit, opts.reduce.tol, reduced.pass,
              "f" + std::to_string(f_deg + 1) + " = " +
                  reduced.fits[f_deg].to_string("I1", "I2") + "; f" + std::to_string(f_ell + 1) +
                  " = " + reduced.fits[f_ell].to_string("I1", "I2"))) {
        verdict.failing_clause = "reduced fits exceed tolerance";
        return verdict;
    }

    // Elliptic normal form of the reduced degenerate block: weights of the
    // profile-rescaled Hamiltonian phi^{-1} o f (finite-difference Hessian at
    // the block origin through the inverted profile).
    {
        CompiledExpr prog(f_block, bchart.coords());
        auto g = [&](double x, double y) {
            double pt[2] = {x, y};
            double v = prog.eval({pt, 2});
            return profile.fit.inverse(v);
        };
        const double h = 1e-2;
        Mat hess(2, 2);
        double g00 = g(0.0, 0.0);
        hess(0, 0) = (g(h, 0) - 2 * g00 + g(-h, 0)) / (h * h);
        hess(1, 1) = (g(0, h) - 2 * g00 + g(0, -h)) / (h * h);
        hess(0, 1) = (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4 * h * h);
        hess(1, 0) = hess(0, 1);
        try {
            verdict.reduced_weights = s1_weights_from_hessian(hess, opts.weights_tol);
            std::ostringstream os;
            os << "weight " << verdict.reduced_weights[0];
            push("reduced-block-weights", 0.0, opts.weights_tol, true, os.str());
        } catch (const NotEllipticError& e) {
            push("reduced-block-weights", 0.0, opts.weights_tol, false, e.what());
            verdict.failing_clause =
                std::string("profile-rescaled block is not elliptic: ") + e.what();
            return verdict;
        }
    }

    verdict.outcome = RigidityVerdict::Outcome::Rigid;
    return verdict;
}

}  // namespace cotlift
