#include "cotlift/spline.hpp"

#include <algorithm>
#include <cmath>

namespace cotlift {

CubicSpline::CubicSpline(Vec x, Vec y, Boundary boundary) : x_(std::move(x)), y_(std::move(y)) {
    const int n = static_cast<int>(x_.size());
    if (n < 4) throw ValidationError("cubic spline needs at least 4 nodes");
    if (y_.size() != n) throw ValidationError("spline node/value count mismatch");
    for (int i = 1; i < n; ++i)
        if (x_[i] <= x_[i - 1]) throw ValidationError("spline nodes must be strictly increasing");

    // Solve for second derivatives M_i. Interior rows are the standard
    // continuity equations; boundary rows implement the end condition.
    Mat a = Mat::Zero(n, n);
    Vec rhs = Vec::Zero(n);
    for (int i = 1; i + 1 < n; ++i) {
        double h0 = x_[i] - x_[i - 1];
        double h1 = x_[i + 1] - x_[i];
        a(i, i - 1) = h0 / 6.0;
        a(i, i) = (h0 + h1) / 3.0;
        a(i, i + 1) = h1 / 6.0;
        rhs[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    if (boundary == Boundary::Natural) {
        a(0, 0) = 1.0;
        a(n - 1, n - 1) = 1.0;
    } else {
        // third-derivative continuity across the second and the second-to-last
        // node: (M1 - M0)/h0 = (M2 - M1)/h1
        double h0 = x_[1] - x_[0];
        double h1 = x_[2] - x_[1];
        a(0, 0) = 1.0 / h0;
        a(0, 1) = -(1.0 / h0 + 1.0 / h1);
        a(0, 2) = 1.0 / h1;
        double g0 = x_[n - 2] - x_[n - 3];
        double g1 = x_[n - 1] - x_[n - 2];
        a(n - 1, n - 3) = 1.0 / g0;
        a(n - 1, n - 2) = -(1.0 / g0 + 1.0 / g1);
        a(n - 1, n - 1) = 1.0 / g1;
    }
    m_ = a.partialPivLu().solve(rhs);
}

int CubicSpline::interval(double s) const {
    const int n = static_cast<int>(x_.size());
    if (s <= x_[0]) return 0;
    if (s >= x_[n - 1]) return n - 2;
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (x_[mid] <= s)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double CubicSpline::value(double s) const {
    int i = interval(s);
    double h = x_[i + 1] - x_[i];
    double a = (x_[i + 1] - s) / h;
    double b = (s - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double s) const {
    int i = interval(s);
    double h = x_[i + 1] - x_[i];
    double a = (x_[i + 1] - s) / h;
    double b = (s - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

double CubicSpline::second_derivative(double s) const {
    int i = interval(s);
    double h = x_[i + 1] - x_[i];
    double a = (x_[i + 1] - s) / h;
    double b = (s - x_[i]) / h;
    return a * m_[i] + b * m_[i + 1];
}

bool CubicSpline::strictly_increasing(double lo, double hi, double slack) const {
    const int n = static_cast<int>(x_.size());
    for (int i = 0; i + 1 < n; ++i) {
        double a = std::max(lo, x_[i]);
        double b = std::min(hi, x_[i + 1]);
        if (a >= b) continue;
        // derivative is quadratic on the interval; minimize at the ends and
        // the interior stationary points of the quadratic
        double d1 = derivative(a);
        double d2 = derivative(b);
        double dmin = std::min(d1, d2);
        double h = x_[i + 1] - x_[i];
        // s'(t) = c0 + c1 t + c2 t^2 with t = s - x_i
        double c2 = (m_[i + 1] - m_[i]) / (2.0 * h);
        double c1 = m_[i];
        if (c2 != 0.0) {
            double tstar = -c1 / (2.0 * c2);
            double sstar = x_[i] + tstar;
            if (sstar > a && sstar < b) dmin = std::min(dmin, derivative(sstar));
        }
        if (dmin <= slack) return false;
    }
    return true;
}

double CubicSpline::inverse(double v) const {
    double lo = min_node(), hi = max_node();
    double flo = value(lo), fhi = value(hi);
    if (flo > fhi) throw DomainError("spline inverse expects an increasing spline");
    if (v < flo - 1e-12 * (1.0 + std::abs(flo)) || v > fhi + 1e-12 * (1.0 + std::abs(fhi)))
        throw DomainError("value outside spline range");
    v = std::clamp(v, flo, fhi);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (value(mid) < v)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * (1.0 + std::abs(hi))) break;
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        double d = derivative(s);
        if (d == 0.0) break;
        double step = (value(s) - v) / d;
        double s_new = std::clamp(s - step, min_node(), max_node());
        s = s_new;
    }
    return s;
}

}  // namespace cotlift
