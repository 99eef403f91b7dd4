#include "cotlift/chart.hpp"

#include <set>

namespace cotlift {

DarbouxChart DarbouxChart::make(std::vector<std::string> positions,
                                std::vector<std::string> momenta,
                                std::vector<bool> periodic) {
    if (positions.empty()) throw ValidationError("chart needs at least one degree of freedom");
    if (positions.size() != momenta.size())
        throw ValidationError("chart needs as many momenta as positions");
    if (periodic.empty()) periodic.assign(positions.size(), false);
    if (periodic.size() != positions.size())
        throw ValidationError("periodic flags must match position count");
    std::set<std::string> seen;
    for (const auto& v : positions)
        if (!seen.insert(v).second) throw ValidationError("duplicate coordinate name: " + v);
    for (const auto& v : momenta)
        if (!seen.insert(v).second) throw ValidationError("duplicate coordinate name: " + v);

    DarbouxChart c;
    c.positions_ = std::move(positions);
    c.momenta_ = std::move(momenta);
    c.periodic_ = std::move(periodic);
    c.coords_ = c.positions_;
    c.coords_.insert(c.coords_.end(), c.momenta_.begin(), c.momenta_.end());
    return c;
}

DarbouxChart DarbouxChart::cotangent(std::vector<std::string> positions,
                                     std::vector<bool> periodic) {
    std::vector<std::string> momenta;
    momenta.reserve(positions.size());
    for (const auto& q : positions) momenta.push_back("p_" + q);
    return make(std::move(positions), std::move(momenta), std::move(periodic));
}

bool DarbouxChart::any_periodic() const {
    for (bool p : periodic_)
        if (p) return true;
    return false;
}

bool DarbouxChart::has_coord(std::string_view name) const {
    for (const auto& c : coords_)
        if (c == name) return true;
    return false;
}

VarBinding DarbouxChart::bind(const Vec& point) const {
    if (point.size() != dim()) throw ValidationError("point dimension does not match chart");
    VarBinding b;
    for (int i = 0; i < dim(); ++i) b.set(coords_[i], point[i]);
    return b;
}

Mat standard_omega(int dof) {
    Mat omega = Mat::Zero(2 * dof, 2 * dof);
    for (int i = 0; i < dof; ++i) {
        omega(i, dof + i) = 1.0;
        omega(dof + i, i) = -1.0;
    }
    return omega;
}

Mat standard_omega_inverse(int dof) { return -standard_omega(dof); }

MomentMapSystem MomentMapSystem::make(DarbouxChart chart, std::vector<Expr> components) {
    if (components.empty()) throw ValidationError("moment map needs at least one component");
    if (static_cast<int>(components.size()) != chart.dof())
        throw ValidationError("moment map component count must equal degrees of freedom");
    for (const Expr& f : components) {
        for (const auto& v : f.free_variables()) {
            if (!chart.has_coord(v))
                throw ValidationError("component uses '" + v + "' which is not a chart coordinate");
        }
    }
    MomentMapSystem s;
    s.chart_ = std::move(chart);
    s.components_ = std::move(components);
    return s;
}

Vec VectorFieldExpr::eval_at(const Vec& point) const {
    VarBinding b = chart.bind(point);
    Vec out(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) out[i] = eval(components[i], b);
    return out;
}

}  // namespace cotlift
