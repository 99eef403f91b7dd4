#include "cotlift/action.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace cotlift {

std::vector<std::string> GroupSpec::param_names() const {
    std::vector<std::string> out;
    out.reserve(factors.size());
    for (const auto& f : factors) out.push_back(f.param);
    return out;
}

bool GroupSpec::all_periodic() const {
    for (const auto& f : factors)
        if (!f.periodic) return false;
    return true;
}

GroupSpec GroupSpec::circle(std::string param) {
    GroupSpec g;
    g.factors.push_back({std::move(param), true});
    return g;
}

GroupSpec GroupSpec::torus(std::vector<std::string> params) {
    GroupSpec g;
    for (auto& p : params) g.factors.push_back({std::move(p), true});
    return g;
}

GroupSpec GroupSpec::real_line(std::vector<std::string> params) {
    GroupSpec g;
    for (auto& p : params) g.factors.push_back({std::move(p), false});
    return g;
}

GroupSpec GroupSpec::product(const GroupSpec& a, const GroupSpec& b) {
    GroupSpec g = a;
    g.factors.insert(g.factors.end(), b.factors.begin(), b.factors.end());
    return g;
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * std::numbers::pi);
    if (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

double base_distance(const Action& action, const Vec& a, const Vec& b) {
    double d = 0.0;
    for (int i = 0; i < action.base_dim(); ++i) {
        double di = action.base_periodic(i) ? std::abs(wrap_angle(a[i] - b[i]))
                                            : std::abs(a[i] - b[i]);
        d = std::max(d, di);
    }
    return d;
}

Vec ActionSpec::pack(const Vec& params, const Vec& q) const {
    Vec full(q.size() + params.size());
    full.head(q.size()) = q;
    full.tail(params.size()) = params;
    return full;
}

ActionSpec ActionSpec::make(GroupSpec group, std::vector<std::string> base_positions,
                            std::vector<bool> base_periodic, std::vector<Expr> components,
                            const ActionValidation& validation) {
    const int m = static_cast<int>(base_positions.size());
    const int d = group.dim();
    if (m == 0) throw ValidationError("action needs at least one base variable");
    if (static_cast<int>(components.size()) != m)
        throw ValidationError("action needs one component per base variable");
    if (base_periodic.empty()) base_periodic.assign(m, false);
    if (static_cast<int>(base_periodic.size()) != m)
        throw ValidationError("periodic flag count must match base dimension");
    std::set<std::string> names(base_positions.begin(), base_positions.end());
    if (static_cast<int>(names.size()) != m) throw ValidationError("duplicate base variable names");
    for (const auto& f : group.factors) {
        if (!names.insert(f.param).second)
            throw ValidationError("parameter name collides: " + f.param);
    }
    for (const Expr& c : components) {
        for (const auto& v : c.free_variables())
            if (!names.count(v))
                throw ValidationError("action component uses unknown variable '" + v + "'");
    }

    ActionSpec a;
    a.group_ = std::move(group);
    a.base_positions_ = std::move(base_positions);
    a.base_periodic_ = std::move(base_periodic);
    a.components_ = std::move(components);
    a.variables_ = a.base_positions_;
    for (const auto& f : a.group_.factors) a.variables_.push_back(f.param);

    a.value_prog_ = compile_all(a.components_, a.variables_);
    std::vector<Expr> jac, hess, par;
    for (const Expr& c : a.components_) {
        std::vector<Expr> grad;
        for (int j = 0; j < m; ++j) grad.push_back(c.diff(a.base_positions_[j]));
        for (int j = 0; j < m; ++j) jac.push_back(grad[j]);
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) hess.push_back(grad[j].diff(a.base_positions_[k]));
        for (int j = 0; j < d; ++j) par.push_back(c.diff(a.group_.factors[j].param));
    }
    a.jac_prog_ = compile_all(jac, a.variables_);
    a.hess_prog_ = compile_all(hess, a.variables_);
    a.param_prog_ = compile_all(par, a.variables_);

    if (!validation.skip) {
        Rng rng(validation.seed);
        auto sample_base = [&] {
            Vec q(m);
            for (int i = 0; i < m; ++i)
                q[i] = a.base_periodic_[i] ? rng.uniform(0.0, 2.0 * std::numbers::pi)
                                           : rng.symmetric();
            return q;
        };
        auto sample_params = [&] {
            Vec g(d);
            for (int i = 0; i < d; ++i)
                g[i] = a.group_.factors[i].periodic ? rng.uniform(0.0, 2.0 * std::numbers::pi)
                                                    : rng.symmetric();
            return g;
        };
        Vec zero = Vec::Zero(d);
        for (int s = 0; s < validation.samples; ++s) {
            Vec q = sample_base();
            double id_res = base_distance(a, a.apply(zero, q), q);
            if (id_res > validation.tol_identity)
                throw ValidationError("identity parameter does not act as identity (residual " +
                                      std::to_string(id_res) + ")");
            Vec g = sample_params();
            Vec h = sample_params();
            Vec lhs = a.apply(g, a.apply(h, q));
            Vec rhs = a.apply(g + h, q);
            double comp_res = base_distance(a, lhs, rhs);
            if (comp_res > validation.tol_composition)
                throw ValidationError("composition law fails at sampled parameters (residual " +
                                      std::to_string(comp_res) + ")");
        }
    }
    return a;
}

Vec ActionSpec::apply(const Vec& params, const Vec& q) const {
    Vec full = pack(params, q);
    std::span<const double> xs(full.data(), static_cast<std::size_t>(full.size()));
    Vec out(base_dim());
    for (int i = 0; i < base_dim(); ++i) out[i] = value_prog_[i].eval(xs);
    return out;
}

Mat ActionSpec::jacobian_q(const Vec& params, const Vec& q) const {
    const int m = base_dim();
    Vec full = pack(params, q);
    std::span<const double> xs(full.data(), static_cast<std::size_t>(full.size()));
    Mat out(m, m);
    int idx = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out(i, j) = jac_prog_[idx++].eval(xs);
    return out;
}

std::vector<Mat> ActionSpec::hessian_q(const Vec& params, const Vec& q) const {
    const int m = base_dim();
    Vec full = pack(params, q);
    std::span<const double> xs(full.data(), static_cast<std::size_t>(full.size()));
    std::vector<Mat> out(m, Mat(m, m));
    int idx = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) out[i](j, k) = hess_prog_[idx++].eval(xs);
    return out;
}

Mat ActionSpec::param_derivative(const Vec& params, const Vec& q) const {
    const int m = base_dim();
    const int d = group_.dim();
    Vec full = pack(params, q);
    std::span<const double> xs(full.data(), static_cast<std::size_t>(full.size()));
    Mat out(m, d);
    int idx = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j) out(i, j) = param_prog_[idx++].eval(xs);
    return out;
}

std::vector<Expr> ActionSpec::components_at(const Vec& params) const {
    std::map<std::string, Expr, std::less<>> repl;
    for (int j = 0; j < group_.dim(); ++j)
        repl.emplace(group_.factors[j].param, Expr::constant(params[j]));
    std::vector<Expr> out;
    out.reserve(components_.size());
    for (const Expr& c : components_) out.push_back(c.substitute(repl));
    return out;
}

}  // namespace cotlift
