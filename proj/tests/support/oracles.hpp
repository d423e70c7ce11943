#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <cmath>
#include <span>
#include <vector>

namespace oracle {

/// dCov^2 straight from E|X-X'||Y-Y'| + E|X-X'|E|Y-Y'| - 2E|X-X'||Y-Y''| with
/// every expectation an average over all index pairs or triples. O(m^3).
inline double dcov2_triple_sum(std::span<const double> x, std::span<const double> y) {
    const std::size_t m = x.size();
    const double md = static_cast<double>(m);
    double t1 = 0.0, ta = 0.0, tb = 0.0, t3 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double a = std::fabs(x[i] - x[j]), b = std::fabs(y[i] - y[j]);
            t1 += a * b;
            ta += a;
            tb += b;
            for (std::size_t k = 0; k < m; ++k) t3 += a * std::fabs(y[i] - y[k]);
        }
    }
    return t1 / (md * md) + (ta / (md * md)) * (tb / (md * md)) - 2.0 * t3 / (md * md * md);
}

/// Integral of |x - y| over [a,b] x [c,d].
inline double abs_diff_rectangle(double a, double b, double c, double d) {
    auto f = [](double x, double y) { return -std::pow(std::fabs(x - y), 3) / 6.0; };
    return f(b, d) - f(b, c) - f(a, d) + f(a, c);
}

/// For the piecewise-constant q of the dependent uniform-marginal example:
/// K = int int |x - x'| q(x) dx dx' over [-1,1]^2, J = int int |x - x'| q(x) q(x').
struct IntroIntegrals {
    double K = 0.0;
    double J = 0.0;
    /// cov(|X-X'|, |Y-Y'|) = J^2 - K^2 / 2 for p = 1/4 - q(x)q(y).
    double cov() const { return J * J - K * K / 2.0; }
};

inline IntroIntegrals intro_integrals_exact(double c) {
    const double lo[2] = {-1.0, 0.0}, hi[2] = {0.0, c}, val[2] = {-c / 2.0, 0.5};
    IntroIntegrals r;
    for (int s = 0; s < 2; ++s) {
        r.K += val[s] * abs_diff_rectangle(lo[s], hi[s], -1.0, 1.0);
        for (int t = 0; t < 2; ++t) r.J += val[s] * val[t] * abs_diff_rectangle(lo[s], hi[s], lo[t], hi[t]);
    }
    return r;
}

/// Midpoint rule on a cells x cells grid over [-1,1]^2.
template <class Q>
IntroIntegrals intro_integrals_midpoint(Q q, int cells) {
    const double h = 2.0 / cells;
    std::vector<double> xs(cells), qs(cells);
    for (int i = 0; i < cells; ++i) {
        xs[i] = -1.0 + (i + 0.5) * h;
        qs[i] = q(xs[i]);
    }
    IntroIntegrals r;
    for (int i = 0; i < cells; ++i) {
        if (qs[i] == 0.0) continue;
        for (int j = 0; j < cells; ++j) {
            const double d = std::fabs(xs[i] - xs[j]) * h * h;
            r.K += qs[i] * d;
            r.J += qs[i] * qs[j] * d;
        }
    }
    return r;
}

}  // namespace oracle
