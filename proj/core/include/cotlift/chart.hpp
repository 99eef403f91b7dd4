#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cotlift/expr.hpp"

namespace cotlift {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Standard symplectic chart R^{2n} with coordinates ordered
// (x_1,...,x_n, y_1,...,y_n) and symplectic matrix
// Omega = [[0, I], [-I, 0]], i.e. the 2-form sum_i dx_i ^ dy_i.
// Positions may be marked 2*pi-periodic (torus charts).
class DarbouxChart {
public:
    DarbouxChart() = default;

    // Throws ValidationError on duplicate names or size mismatch.
    static DarbouxChart make(std::vector<std::string> positions,
                             std::vector<std::string> momenta,
                             std::vector<bool> periodic = {});

    // Positions x_1..x_n, momenta auto-named "p_<position>".
    static DarbouxChart cotangent(std::vector<std::string> positions,
                                  std::vector<bool> periodic = {});

    int dof() const { return static_cast<int>(positions_.size()); }
    int dim() const { return 2 * dof(); }

    const std::vector<std::string>& positions() const { return positions_; }
    const std::vector<std::string>& momenta() const { return momenta_; }
    // All 2n coordinate names, positions first.
    const std::vector<std::string>& coords() const { return coords_; }
    const std::string& coord(int i) const { return coords_[i]; }

    bool position_periodic(int i) const { return periodic_[i]; }
    bool any_periodic() const;
    // Periodicity per full coordinate index (momenta never periodic).
    bool coord_periodic(int i) const { return i < dof() && periodic_[i]; }

    bool has_coord(std::string_view name) const;

    VarBinding bind(const Vec& point) const;

    bool operator==(const DarbouxChart& other) const {
        return positions_ == other.positions_ && momenta_ == other.momenta_ &&
               periodic_ == other.periodic_;
    }

private:
    std::vector<std::string> positions_;
    std::vector<std::string> momenta_;
    std::vector<bool> periodic_;
    std::vector<std::string> coords_;
};

// Omega = [[0, I], [-I, 0]] for n degrees of freedom.
Mat standard_omega(int dof);
// Omega^{-1} = -Omega.
Mat standard_omega_inverse(int dof);

struct PhasePoint {
    DarbouxChart chart;
    Vec coords;
};

// An integrable-system candidate: n functions on a 2n-chart.
class MomentMapSystem {
public:
    MomentMapSystem() = default;
    // Validates component count == dof and that every free variable of every
    // component is a chart coordinate.
    static MomentMapSystem make(DarbouxChart chart, std::vector<Expr> components);

    const DarbouxChart& chart() const { return chart_; }
    const std::vector<Expr>& components() const { return components_; }
    const Expr& component(int i) const { return components_[i]; }
    int size() const { return static_cast<int>(components_.size()); }

private:
    DarbouxChart chart_;
    std::vector<Expr> components_;
};

// 2n symbolic components in chart coordinate order.
struct VectorFieldExpr {
    DarbouxChart chart;
    std::vector<Expr> components;

    Vec eval_at(const Vec& point) const;
};

}  // namespace cotlift
