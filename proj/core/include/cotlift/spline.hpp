#pragma once

#include "cotlift/chart.hpp"

namespace cotlift {

// Interpolating cubic spline on strictly increasing nodes. Not-a-knot end
// conditions by default (reproduces cubics exactly); natural available for
// callers that want bounded end curvature. Evaluation outside the node range
// extends the end cubics.
class CubicSpline {
public:
    enum class Boundary { NotAKnot, Natural };

    CubicSpline() = default;
    CubicSpline(Vec x, Vec y, Boundary boundary = Boundary::NotAKnot);

    double operator()(double s) const { return value(s); }
    double value(double s) const;
    double derivative(double s) const;
    double second_derivative(double s) const;

    double min_node() const { return x_[0]; }
    double max_node() const { return x_[x_.size() - 1]; }

    // Exact check (per-interval quadratic minimization of the derivative)
    // that the spline is strictly increasing on [lo, hi].
    bool strictly_increasing(double lo, double hi, double slack = 0.0) const;

    // Inverse for strictly monotone splines: bisection to roundoff then a
    // Newton polish. Throws DomainError when v is outside the value range.
    double inverse(double v) const;

private:
    int interval(double s) const;

    Vec x_;
    Vec y_;
    Vec m_;  // second derivatives at nodes
};

}  // namespace cotlift
