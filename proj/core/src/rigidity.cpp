#include "cotlift/rigidity.hpp"

#include <cmath>
#include <numbers>

#include "cotlift/flows.hpp"
#include "cotlift/lift.hpp"
#include "cotlift/sampling.hpp"
#include "cotlift/spline.hpp"

namespace cotlift {

namespace {

double phase_distance(const Action& action, const Vec& a, const Vec& b) {
    const int m = action.base_dim();
    double d = 0.0;
    for (int i = 0; i < m; ++i) {
        double di = action.base_periodic(i) ? std::abs(wrap_angle(a[i] - b[i]))
                                            : std::abs(a[i] - b[i]);
        d = std::max(d, di);
    }
    for (int i = m; i < 2 * m; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

Vec lifted_apply(const Action& action, const Vec& params, const Vec& z) {
    const int m = action.base_dim();
    Vec q = z.head(m);
    Vec p = z.tail(m);
    Mat jac = action.jacobian_q(params, q);
    Vec out(2 * m);
    out.head(m) = action.apply(params, q);
    out.tail(m) = jac.transpose().partialPivLu().solve(p);
    return out;
}

std::vector<Vec> sample_group(const GroupSpec& group, int count, Rng& rng, double line_range) {
    std::vector<Vec> out;
    out.reserve(count);
    for (int s = 0; s < count; ++s) {
        Vec g(group.dim());
        for (int j = 0; j < group.dim(); ++j)
            g[j] = group.factors[j].periodic ? rng.uniform(0.0, 2.0 * std::numbers::pi)
                                             : rng.uniform(-line_range, line_range);
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace

AveragedMap::AveragedMap(std::shared_ptr<const Action> rho1, std::shared_ptr<const Action> rho2,
                         GroupQuadrature quadrature)
    : rho1_(std::move(rho1)), rho2_(std::move(rho2)), quad_(std::move(quadrature)) {
    if (rho1_->base_dim() != rho2_->base_dim())
        throw ValidationError("actions must share the base");
    if (rho1_->group().dim() != rho2_->group().dim())
        throw ValidationError("actions must share the group");
    for (int i = 0; i < rho1_->base_dim(); ++i)
        if (rho1_->base_periodic(i) != rho2_->base_periodic(i))
            throw ValidationError("actions disagree on base periodicity");
}

int AveragedMap::dim_in() const { return rho1_->base_dim(); }

void AveragedMap::accumulate(const Vec& x, int order, Vec* val, Mat* jac,
                             std::vector<Mat>* hess) const {
    const int m = dim_in();
    const int nn = quad_.size();

    // Per-coordinate accumulators. Euclidean coordinates average the terms
    // directly; periodic ones go through the circular mean
    // atan2(S, C) with S = sum w sin(t), C = sum w cos(t).
    Vec mean = Vec::Zero(m);
    Mat mean_jac = Mat::Zero(m, m);
    std::vector<Mat> mean_hess;
    Vec cs = Vec::Zero(m), sn = Vec::Zero(m);
    Mat cs_j = Mat::Zero(m, m), sn_j = Mat::Zero(m, m);
    std::vector<Mat> cs_h, sn_h;
    if (order >= 2) {
        mean_hess.assign(m, Mat::Zero(m, m));
        cs_h.assign(m, Mat::Zero(m, m));
        sn_h.assign(m, Mat::Zero(m, m));
    }

    std::vector<double> angles(order == 0 ? nn * m : 0);

    for (int g = 0; g < nn; ++g) {
        const Vec& node = quad_.nodes[g];
        const double w = quad_.weights[g];
        Vec y = rho2_->apply(node, x);
        Vec inv_node = -node;
        Vec t = rho1_->apply(inv_node, y);

        Mat jt;
        std::vector<Mat> ht;
        if (order >= 1) {
            Mat j2 = rho2_->jacobian_q(node, x);
            Mat j1 = rho1_->jacobian_q(inv_node, y);
            jt = j1 * j2;
            if (order >= 2) {
                auto h2 = rho2_->hessian_q(node, x);
                auto h1 = rho1_->hessian_q(inv_node, y);
                ht.assign(m, Mat::Zero(m, m));
                // d2 t_i = sum_ab h1^i_ab (j2 u)_a (j2 v)_b + sum_a j1_ia h2^a(u, v)
                for (int i = 0; i < m; ++i) {
                    Mat acc = j2.transpose() * h1[i] * j2;
                    for (int a = 0; a < m; ++a) acc += j1(i, a) * h2[a];
                    ht[i] = acc;
                }
            }
        }

        for (int i = 0; i < m; ++i) {
            if (rho1_->base_periodic(i)) {
                double c = std::cos(t[i]);
                double s = std::sin(t[i]);
                cs[i] += w * c;
                sn[i] += w * s;
                if (order == 0) angles[g * m + i] = t[i];
                if (order >= 1) {
                    for (int j = 0; j < m; ++j) {
                        cs_j(i, j) += -w * s * jt(i, j);
                        sn_j(i, j) += w * c * jt(i, j);
                    }
                }
                if (order >= 2) {
                    for (int j = 0; j < m; ++j)
                        for (int k = 0; k < m; ++k) {
                            double tj = jt(i, j), tk = jt(i, k);
                            cs_h[i](j, k) += w * (-c * tj * tk - s * ht[i](j, k));
                            sn_h[i](j, k) += w * (-s * tj * tk + c * ht[i](j, k));
                        }
                }
            } else {
                mean[i] += w * t[i];
                if (order >= 1) mean_jac.row(i) += w * jt.row(i);
                if (order >= 2) mean_hess[i] += w * ht[i];
            }
        }
    }

    for (int i = 0; i < m; ++i) {
        if (!rho1_->base_periodic(i)) continue;
        double c = cs[i], s = sn[i];
        double r2 = c * c + s * s;
        if (r2 < 0.25)
            throw CloudTooSpreadError("node cloud too spread for a circular mean (|resultant| " +
                                      std::to_string(std::sqrt(r2)) + ")");
        double phi = std::atan2(s, c);
        if (order == 0) {
            // half-circle containment: every node angle within pi/2 of the mean
            for (int g = 0; g < nn; ++g) {
                double dev = std::abs(wrap_angle(angles[g * m + i] - phi));
                if (dev >= 0.5 * std::numbers::pi)
                    throw CloudTooSpreadError(
                        "node cloud leaves an open half-circle (deviation " +
                        std::to_string(dev) + ")");
            }
        }
        mean[i] = phi;
        if (order >= 1) {
            for (int j = 0; j < m; ++j)
                mean_jac(i, j) = (c * sn_j(i, j) - s * cs_j(i, j)) / r2;
        }
        if (order >= 2) {
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    double num = cs_j(i, k) * sn_j(i, j) + c * sn_h[i](j, k) -
                                 sn_j(i, k) * cs_j(i, j) - s * cs_h[i](j, k);
                    double dr2 = 2.0 * (c * cs_j(i, k) + s * sn_j(i, k));
                    mean_hess[i](j, k) = num / r2 - mean_jac(i, j) * dr2 / r2;
                }
        }
    }

    if (val) *val = mean;
    if (jac) *jac = mean_jac;
    if (hess) *hess = mean_hess;
}

Vec AveragedMap::value(const Vec& x) const {
    Vec v;
    accumulate(x, 0, &v, nullptr, nullptr);
    return v;
}

Mat AveragedMap::jacobian(const Vec& x) const {
    Mat j;
    accumulate(x, 1, nullptr, &j, nullptr);
    return j;
}

std::vector<Mat> AveragedMap::hessian(const Vec& x) const {
    std::vector<Mat> h;
    accumulate(x, 2, nullptr, nullptr, &h);
    return h;
}

std::shared_ptr<const SmoothMap> lift_conjugation(std::shared_ptr<const SmoothMap> phi,
                                                  double det_threshold) {
    return std::make_shared<CotangentLiftMap>(std::move(phi), det_threshold);
}

namespace {

struct ResidualScratch {
    std::vector<Vec> points;
    std::vector<Vec> params;
    std::vector<Vec> phase_points;
};

ResidualScratch make_samples(const Action& rho, const Box& domain, const AveragingOptions& opts) {
    ResidualScratch s;
    s.points = sample_box(domain, opts.point_samples, opts.seed);
    Rng rng(opts.seed ^ 0xabcdef1234567890ull);
    s.params = sample_group(rho.group(), opts.param_samples, rng, 1.0);
    const int m = rho.base_dim();
    Box phase_box;
    phase_box.lo = Vec(2 * m);
    phase_box.hi = Vec(2 * m);
    phase_box.lo.head(m) = domain.lo;
    phase_box.hi.head(m) = domain.hi;
    phase_box.lo.tail(m) = Vec::Constant(m, -opts.momentum_range);
    phase_box.hi.tail(m) = Vec::Constant(m, opts.momentum_range);
    s.phase_points = sample_box(phase_box, opts.phase_samples, opts.seed + 7);
    return s;
}

double conjugation_defect(const Action& rho1, const Action& rho2, const SmoothMap& phi,
                          const Vec& g, const Vec& x) {
    Vec lhs = rho1.apply(g, phi.value(x));
    Vec rhs = phi.value(rho2.apply(g, x));
    return base_distance(rho1, lhs, rhs);
}

double conjugation_defect_c1(const Action& rho1, const Action& rho2, const SmoothMap& phi,
                             const Vec& g, const Vec& x) {
    // d/dx [rho1(g) o phi] - d/dx [phi o rho2(g)]
    Vec phix = phi.value(x);
    Mat lhs = rho1.jacobian_q(g, phix) * phi.jacobian(x);
    Vec rx = rho2.apply(g, x);
    Mat rhs = phi.jacobian(rx) * rho2.jacobian_q(g, x);
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace

ConjugationResult palais_average(std::shared_ptr<const Action> rho1,
                                 std::shared_ptr<const Action> rho2, const GroupQuadrature& quad,
                                 const Box& domain, const AveragingOptions& opts) {
    ConjugationResult result;
    result.quadrature_nodes = quad.size();
    result.seed = opts.seed;

    ResidualScratch samples = make_samples(*rho1, domain, opts);

    // Closeness gate (C0 enforced, C1 recorded).
    for (const Vec& g : samples.params) {
        for (const Vec& x : samples.points) {
            Vec a = rho1->apply(g, x);
            Vec b = rho2->apply(g, x);
            result.action_c0_distance =
                std::max(result.action_c0_distance, base_distance(*rho1, a, b));
            Mat ja = rho1->jacobian_q(g, x);
            Mat jb = rho2->jacobian_q(g, x);
            result.action_c1_distance =
                std::max(result.action_c1_distance, (ja - jb).cwiseAbs().maxCoeff());
        }
    }
    if (result.action_c0_distance > opts.closeness_bound)
        throw HypothesisError("actions are not C0-close on the domain (distance " +
                              std::to_string(result.action_c0_distance) + " > bound " +
                              std::to_string(opts.closeness_bound) + ")");

    auto phi = std::make_shared<AveragedMap>(rho1, rho2, quad);
    result.phi = phi;

    result.min_jacobian_det = std::numeric_limits<double>::infinity();
    for (const Vec& x : samples.points) {
        double det = phi->jacobian(x).determinant();
        result.min_jacobian_det = std::min(result.min_jacobian_det, std::abs(det));
    }
    if (result.min_jacobian_det < opts.det_threshold)
        throw NonInvertibleJacobianError("averaged map is numerically non-invertible (|det| " +
                                         std::to_string(result.min_jacobian_det) + ")");

    for (const Vec& g : samples.params) {
        for (const Vec& x : samples.points) {
            result.residual_conj =
                std::max(result.residual_conj, conjugation_defect(*rho1, *rho2, *phi, g, x));
            result.residual_conj_c1 =
                std::max(result.residual_conj_c1, conjugation_defect_c1(*rho1, *rho2, *phi, g, x));
        }
    }
    for (const Vec& g : quad.nodes) {
        for (const Vec& x : samples.points) {
            result.residual_node_equivariance = std::max(
                result.residual_node_equivariance, conjugation_defect(*rho1, *rho2, *phi, g, x));
        }
    }
    return result;
}

ConjugationResult verify_equivalence_suite(std::shared_ptr<const Action> rho1,
                                           std::shared_ptr<const Action> rho2,
                                           std::shared_ptr<const SmoothMap> phi, const Box& domain,
                                           const AveragingOptions& opts) {
    ConjugationResult result;
    result.seed = opts.seed;
    result.phi = phi;
    ResidualScratch samples = make_samples(*rho1, domain, opts);

    for (const Vec& g : samples.params) {
        for (const Vec& x : samples.points) {
            result.residual_conj =
                std::max(result.residual_conj, conjugation_defect(*rho1, *rho2, *phi, g, x));
            result.residual_conj_c1 =
                std::max(result.residual_conj_c1, conjugation_defect_c1(*rho1, *rho2, *phi, g, x));
        }
    }

    auto phi_hat = lift_conjugation(phi);
    const int m = rho1->base_dim();

    double max_lift_jac = 0.0;
    for (const Vec& g : samples.params) {
        for (const Vec& z : samples.phase_points) {
            Vec lhs = lifted_apply(*rho1, g, phi_hat->value(z));
            Vec rhs = phi_hat->value(lifted_apply(*rho2, g, z));
            result.residual_conj_lifted =
                std::max(result.residual_conj_lifted, phase_distance(*rho1, lhs, rhs));
            max_lift_jac = std::max(
                max_lift_jac, rho1->jacobian_q(g, phi_hat->value(z).head(m)).cwiseAbs().maxCoeff());
        }
    }

    MapCheckReport symp = is_symplectomorphism(*phi_hat, samples.phase_points, opts.tol);
    result.residual_sympl = symp.max_residual;

    // <mu_i, X_j> = lambda(X_j^#) with the -t orientation: -p . d rho_i/d
    // theta_j at the identity.
    const int d = rho1->group().dim();
    Vec zero = Vec::Zero(d);
    for (const Vec& z : samples.phase_points) {
        Vec q = z.head(m);
        Vec p = z.tail(m);
        Vec w = phi_hat->value(z);
        Vec qw = w.head(m);
        Vec pw = w.tail(m);
        Mat d2 = rho2->param_derivative(zero, q);
        Mat d1 = rho1->param_derivative(zero, qw);
        for (int j = 0; j < d; ++j) {
            double mu2 = kFundamentalFieldSign * p.dot(d2.col(j));
            double mu1 = kFundamentalFieldSign * pw.dot(d1.col(j));
            result.residual_moment = std::max(result.residual_moment, std::abs(mu2 - mu1));
        }
    }

    double max_phi_jac = 0.0;
    for (const Vec& z : samples.phase_points)
        max_phi_jac = std::max(max_phi_jac, phi_hat->jacobian(z).cwiseAbs().maxCoeff());
    result.lift_constant = (1.0 + m * max_lift_jac) * (1.0 + m * max_phi_jac);
    return result;
}

// ---------------------------------------------------------------------------
// Elliptic leaf rigidity (1-DOF action/angle transport)
// ---------------------------------------------------------------------------

namespace {

struct OneDofLeaf {
    Expr f;
    DarbouxChart chart;
    CompiledExpr value;
    CompiledExpr fx, fy;

    explicit OneDofLeaf(const Expr& fn, const DarbouxChart& c)
        : f(fn),
          chart(c),
          value(fn, c.coords()),
          fx(fn.diff(c.positions()[0]), c.coords()),
          fy(fn.diff(c.momenta()[0]), c.coords()) {}

    double eval(const Vec& z) const {
        return value.eval({z.data(), static_cast<std::size_t>(z.size())});
    }
    double grad_norm(const Vec& z) const {
        std::span<const double> zs(z.data(), static_cast<std::size_t>(z.size()));
        return std::hypot(fx.eval(zs), fy.eval(zs));
    }
};

// Critical points of f inside the box: coarse grid minima of |grad f|
// refined by Newton on grad f = 0.
std::vector<Vec> find_critical_points(const Expr& f, const DarbouxChart& chart, double radius) {
    std::vector<std::string> vars = chart.coords();
    Expr gx = f.diff(vars[0]);
    Expr gy = f.diff(vars[1]);
    ExprMap grad({gx, gy}, vars);
    std::vector<Vec> found;
    const int grid = 11;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            Vec z(2);
            z << -radius + 2.0 * radius * i / (grid - 1), -radius + 2.0 * radius * j / (grid - 1);
            for (int it = 0; it < 40; ++it) {
                Vec g = grad.value(z);
                if (g.norm() < 1e-13) break;
                Mat jac = grad.jacobian(z);
                if (std::abs(jac.determinant()) < 1e-14) break;
                Vec step = jac.partialPivLu().solve(g);
                if (step.norm() > radius) break;
                z -= step;
            }
            if (grad.value(z).norm() > 1e-10 || z.cwiseAbs().maxCoeff() > 1.5 * radius) continue;
            bool is_new = true;
            for (const Vec& w : found) is_new = is_new && (w - z).norm() > 1e-6;
            if (is_new) found.push_back(z);
        }
    }
    return found;
}

// Precompiled 1-DOF Hamiltonian flow with ray-section utilities.
class BlockFlow {
public:
    BlockFlow(const Expr& f, const DarbouxChart& chart)
        : progs_(compile_all(hamiltonian_vector_field(f, chart).components, chart.coords())) {}

    void field(const Vec& p, Vec& out) const {
        std::span<const double> ps(p.data(), static_cast<std::size_t>(p.size()));
        out[0] = progs_[0].eval(ps);
        out[1] = progs_[1].eval(ps);
    }

    void step(Vec& z, double dt, Vec& k1, Vec& k2, Vec& k3, Vec& k4, Vec& tmp) const {
        field(z, k1);
        tmp = z + (0.5 * dt) * k1;
        field(tmp, k2);
        tmp = z + (0.5 * dt) * k2;
        field(tmp, k3);
        tmp = z + dt * k3;
        field(tmp, k4);
        z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    Vec flow_for_time(Vec z, double time, int steps) const {
        double dt = time / steps;
        Vec k1(2), k2(2), k3(2), k4(2), tmp(2);
        for (int k = 0; k < steps; ++k) step(z, dt, k1, k2, k3, k4, tmp);
        return z;
    }

    // Time to reach the ray section {y = 0, x > 0} flowing forward, with the
    // crossing orientation of sdot_sign; Henon final step.
    double time_to_section(Vec z, double period, double sdot_sign) const {
        const int n_steps = 8192;
        double dt = period / n_steps;
        Vec k1(2), k2(2), k3(2), k4(2), tmp(2), v(2);
        double t = 0.0;
        double s_prev = z[1];
        for (int k = 0; k < n_steps + 8; ++k) {
            step(z, dt, k1, k2, k3, k4, tmp);
            t += dt;
            double s = z[1];
            if (s_prev * s < 0.0 && z[0] > 0.0) {
                field(z, v);
                if (v[1] * sdot_sign > 0.0) {
                    Vec zt(3);
                    zt.head(2) = z;
                    zt[2] = t;
                    auto rhs = [&](const Vec& state, Vec& out) {
                        Vec pos = state.head(2);
                        Vec vv(2);
                        field(pos, vv);
                        out.head(2) = vv / vv[1];
                        out[2] = 1.0 / vv[1];
                    };
                    Vec h1(3), h2(3), h3(3), h4(3), ht(3);
                    double ds = -s;
                    rhs(zt, h1);
                    ht = zt + (0.5 * ds) * h1;
                    rhs(ht, h2);
                    ht = zt + (0.5 * ds) * h2;
                    rhs(ht, h3);
                    ht = zt + ds * h3;
                    rhs(ht, h4);
                    zt += (ds / 6.0) * (h1 + 2.0 * h2 + 2.0 * h3 + h4);
                    return zt[2];
                }
            }
            s_prev = s;
        }
        throw NonCompactLevelError("orbit did not reach the reference section");
    }

private:
    std::vector<CompiledExpr> progs_;
};

// Per-level data of a 1-DOF elliptic family over a level interval, splined so
// leaf transport does not re-trace orbits per point.
struct LevelTable {
    CubicSpline action;   // A(level)
    CubicSpline period;   // T(level)
    CubicSpline start_x;  // ray intersection x(level)
    double sdot_sign = 1.0;
    double lo = 0.0, hi = 0.0;

    static LevelTable build(const Expr& f, const DarbouxChart& chart, double lo, double hi,
                            int nodes, const LevelTraceOptions& topts) {
        LevelTable table;
        table.lo = lo;
        table.hi = hi;
        Vec levels = Vec::LinSpaced(nodes, lo, hi);
        Vec act(nodes), per(nodes), sx(nodes);
        for (int i = 0; i < nodes; ++i) {
            LevelTrace trace = trace_closed_level(f, chart, levels[i], topts);
            act[i] = std::abs(trace.area) / (2.0 * std::numbers::pi);
            per[i] = trace.period;
            sx[i] = trace.start[0];
            if (i == 0) {
                BlockFlow flow(f, chart);
                Vec v(2);
                flow.field(trace.start, v);
                table.sdot_sign = v[1] > 0.0 ? 1.0 : -1.0;
            }
        }
        table.action = CubicSpline(levels, act);
        table.period = CubicSpline(levels, per);
        table.start_x = CubicSpline(levels, sx);
        return table;
    }
};

}  // namespace

LeafRigidityReport elliptic_leaf_rigidity_experiment(const Expr& f, const Expr& fhat,
                                                     const DarbouxChart& chart, double c,
                                                     const LeafRigidityConfig& config) {
    if (chart.dof() != 1)
        throw ValidationError("the leaf experiment handles 1-DOF blocks (and products of them)");

    LeafRigidityReport report;
    report.c = c;
    report.tol = 1e-6;

    // Hypothesis gate: every critical point in the window must be elliptic.
    for (const Expr* fn : {&f, &fhat}) {
        for (const Vec& cp : find_critical_points(*fn, chart, 1.6)) {
            MomentMapSystem sys = MomentMapSystem::make(chart, {*fn});
            auto cls = classify_point(sys, cp);
            if (!cls) continue;
            if (cls->degenerate() || cls->williamson->k_h > 0 || cls->williamson->k_f > 0)
                throw HypothesisError(
                    "window contains a non-elliptic singular point (Williamson hypothesis "
                    "violated)");
        }
    }

    if (f.same_tree(fhat)) {
        report.identity_shortcut = true;
        report.c_hat = c;
        LevelTraceOptions topts;
        report.action_value = action_variable_1dof(f, chart, c, topts);
        report.residual_conj = 0.0;
        report.residual_sympl = 0.0;
        report.pass = true;
        return report;
    }

    OneDofLeaf leaf_f(f, chart);
    OneDofLeaf leaf_g(fhat, chart);
    BlockFlow flow_f(f, chart);
    BlockFlow flow_g(fhat, chart);

    LevelTraceOptions topts;
    topts.return_tol = config.trace_tol;

    double action_c = action_variable_1dof(f, chart, c, topts);
    report.action_value = action_c;

    // Direct (uncached) level match by secant on the enclosed area.
    auto match_level_direct = [&](double target_action) {
        double a = c;
        double b = 1.2 * c;
        auto act = [&](double level) { return action_variable_1dof(fhat, chart, level, topts); };
        double fa = act(a) - target_action;
        if (std::abs(fa) < 1e-12) return a;
        double fb = act(b) - target_action;
        for (int it = 0; it < 60 && std::abs(fb) > 1e-12; ++it) {
            if (fb == fa) break;
            double nxt = b - fb * (b - a) / (fb - fa);
            a = b;
            fa = fb;
            b = nxt;
            fb = act(b) - target_action;
        }
        return b;
    };
    report.c_hat = match_level_direct(action_c);

    // Level windows (with margin) and their splined per-level data.
    const double margin = 1.15;
    double f_lo = c * (1.0 - margin * config.window_halfwidth);
    double f_hi = c * (1.0 + margin * config.window_halfwidth);
    const int table_nodes = 13;
    LevelTable table_f = LevelTable::build(f, chart, f_lo, f_hi, table_nodes, topts);
    double g_lo = match_level_direct(table_f.action.value(f_lo));
    double g_hi = match_level_direct(table_f.action.value(f_hi));
    LevelTable table_g = LevelTable::build(fhat, chart, g_lo, g_hi, table_nodes, topts);

    auto match_level = [&](double level) {
        return table_g.action.inverse(table_f.action.value(level));
    };

    std::vector<double> levels(config.annulus_levels);
    std::vector<double> matched(config.annulus_levels);
    for (int i = 0; i < config.annulus_levels; ++i) {
        double frac = config.annulus_levels == 1
                          ? 0.0
                          : -config.window_halfwidth +
                                2.0 * config.window_halfwidth * i / (config.annulus_levels - 1);
        levels[i] = c * (1.0 + frac);
        matched[i] = match_level(levels[i]);
    }

    // phi_c: level + angle transport. For each sample z on a level of f:
    // measure its angle from the ray section, then place it at the same angle
    // on the matched level of fhat.
    auto transport = [&](const Vec& z) {
        double level = leaf_f.eval(z);
        double level_hat = match_level(level);
        double period = table_f.period.value(level);
        double tau = flow_f.time_to_section(z, period, table_f.sdot_sign);
        double theta = 1.0 - tau / period;  // fraction of a period past the section
        Vec start_hat(2);
        start_hat << table_g.start_x.value(level_hat), 0.0;
        double period_hat = table_g.period.value(level_hat);
        return flow_g.flow_for_time(start_hat, theta * period_hat, 8192);
    };

    // Conjugation residual on the annulus: |fhat(phi(z)) - m(f(z))| with the
    // level matching m given by equal actions.
    Rng rng(config.seed);
    double worst_conj = 0.0;
    for (int li = 0; li < config.annulus_levels; ++li) {
        LevelTrace trace = trace_closed_level(f, chart, levels[li], topts);
        int stride = std::max<int>(1, static_cast<int>(trace.curve.size()) /
                                          config.points_per_level);
        for (std::size_t k = 0; k < trace.curve.size(); k += stride) {
            Vec w = transport(trace.curve[k]);
            worst_conj = std::max(worst_conj, std::abs(leaf_g.eval(w) - matched[li]));
        }
    }
    report.residual_conj = worst_conj;

    // Finite-difference symplecticity of the transported map on mid-annulus
    // points.
    const Mat omega = standard_omega(1);
    double worst_symp = 0.0;
    LevelTrace mid = trace_closed_level(f, chart, c, topts);
    int stride = std::max<int>(1, static_cast<int>(mid.curve.size()) / config.sympl_points);
    const double h = config.fd_step;
    for (std::size_t k = 0; k < mid.curve.size(); k += stride) {
        const Vec& z = mid.curve[k];
        Mat jac(2, 2);
        for (int col = 0; col < 2; ++col) {
            Vec zp = z, zm = z;
            zp[col] += h;
            zm[col] -= h;
            Vec wp = transport(zp);
            Vec wm = transport(zm);
            jac.col(col) = (wp - wm) / (2.0 * h);
        }
        double r = (jac.transpose() * omega * jac - omega).cwiseAbs().maxCoeff();
        worst_symp = std::max(worst_symp, r);
    }
    report.residual_sympl = worst_symp;
    report.pass = report.residual_conj <= report.tol && report.residual_sympl <= report.tol;
    return report;
}

}  // namespace cotlift
