#include "roulette/analytic/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "roulette/common.hpp"

namespace roulette::analytic {

std::complex<double> joint_cf(double t, double s) noexcept {
    const double mod = std::exp(-2.0 * std::fabs(t) - t * t) / (1.0 + s * s);
    return std::polar(mod, t * t * s);
}

double cf_modulus_identity(double t, double s) noexcept {
    return std::fabs(std::abs(joint_cf(t, s)) - std::abs(joint_cf(t, 0.0)) * std::abs(joint_cf(0.0, s)));
}

double ghat(double t, double y) noexcept {
    return std::exp(-2.0 * std::fabs(t) - t * t - std::fabs(t * t - y) + std::fabs(y));
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
    require(step > 0.0 && hi >= lo, "grid needs lo <= hi and a positive step");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g[i] = lo + static_cast<double>(i) * step;
    return g;
}

PolyaReport polya_check(double y, std::span<const double> t, double tolerance, double tail_tolerance) {
    require(t.size() >= 3, "grid needs at least three points");
    require(t[0] == 0.0, "grid must start at 0");
    for (std::size_t i = 1; i < t.size(); ++i) require(t[i] > t[i - 1], "grid must be strictly increasing");
    PolyaReport r;
    r.y = y;
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = ghat(t[i], y);

    auto record = [&](const char* name, std::size_t count, double where, double value) {
        if (count > 0) r.violations.push_back({name, where, value, count});
    };

    r.origin = v[0] == 1.0;
    record("origin", r.origin ? 0 : 1, 0.0, v[0]);

    std::size_t odd = 0;
    double odd_worst = 0.0, odd_at = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = std::fabs(ghat(-t[i], y) - v[i]);
        if (d != 0.0) {
            ++odd;
            if (d > odd_worst) odd_worst = d, odd_at = t[i];
        }
    }
    r.even = odd == 0;
    record("even", odd, odd_at, odd_worst);

    std::size_t rising = 0, bent = 0;
    double rise_worst = 0.0, rise_at = 0.0, bend_worst = 0.0, bend_at = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double d = v[i] - v[i - 1];
        if (d > tolerance) {
            ++rising;
            if (d > rise_worst) rise_worst = d, rise_at = t[i];
        }
        if (i + 1 < t.size()) {
            const double left = (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
            const double right = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
            const double bend = right - left;
            if (bend < -tolerance) {
                ++bent;
                if (bend < bend_worst) bend_worst = bend, bend_at = t[i];
            }
        }
    }
    r.nonincreasing = rising == 0;
    record("nonincreasing", rising, rise_at, rise_worst);
    r.convex = bent == 0;
    record("convex", bent, bend_at, bend_worst);

    r.vanishing = v.back() <= tail_tolerance;
    record("vanishing", r.vanishing ? 0 : 1, t.back(), v.back());
    return r;
}

namespace {

// On a panel g^(t) = exp(-P(t)) with P(t) = p0 + p1 t + p2 t^2 / 2, p1, p2 >= 0.
struct Panel {
    double a, b;
    double p0, p1, p2;

    double P(double t) const { return p0 + p1 * t + 0.5 * p2 * t * t; }
    double dP(double t) const { return p1 + p2 * t; }
};

std::vector<Panel> panels_for(double y, double T) {
    std::vector<Panel> out;
    if (y > 0.0) {
        const double r = std::sqrt(y);
        out.push_back({0.0, r, 0.0, 2.0, 0.0});
        out.push_back({r, T, -2.0 * y, 2.0, 4.0});
    } else {
        out.push_back({0.0, T, 0.0, 2.0, 4.0});
    }
    return out;
}

// h^4/720 * int_a^b sup |d^4/dt^4 (g^(t) e^{-itx})|, on sub-intervals of length <= 1/4.
double discretisation_bound(const Panel& p, double h, double x) {
    const double pieces = std::max(1.0, std::ceil((p.b - p.a) / 0.25));
    const double len = (p.b - p.a) / pieces;
    double integral = 0.0;
    for (double k = 0; k < pieces; ++k) {
        const double s0 = p.a + k * len, s1 = s0 + len;
        const double r = p.dP(s1) + std::fabs(x);
        const double sup = (r * r * r * r + 6.0 * r * r * p.p2 + 3.0 * p.p2 * p.p2) * std::exp(-p.P(s0));
        integral += sup * len;
    }
    return std::pow(h, 4) / 720.0 * integral;
}

}  // namespace

InverseFourierResult inverse_fourier_nonneg(double y, std::span<const double> x_grid, QuadratureBudget budget) {
    require(std::isfinite(y), "y must be finite");
    require(!x_grid.empty(), "x grid is empty");
    const double T = budget.T > 0.0 ? budget.T : 8.0 + std::sqrt(std::fabs(y));
    require(budget.step > 0.0, "quadrature step must be positive");
    require(y <= 0.0 || T > std::sqrt(y), "truncation point must exceed sqrt(y)");

    const auto panels = panels_for(y, T);
    struct Node {
        double t, weight, value, odd;
    };
    std::vector<Node> nodes;
    std::vector<double> hs;
    for (const Panel& p : panels) {
        const auto n = static_cast<std::size_t>(std::ceil((p.b - p.a) / budget.step));
        const double h = (p.b - p.a) / static_cast<double>(n);
        hs.push_back(h);
        for (std::size_t i = 0; i <= n; ++i) {
            const double t = i == n ? p.b : p.a + static_cast<double>(i) * h;
            const double w = (i == 0 || i == n) ? 0.5 * h : h;
            nodes.push_back({t, w, ghat(t, y), ghat(t, y) - ghat(-t, y)});
        }
    }

    InverseFourierResult res;
    res.y = y;
    GridFunction& g = res.g;
    g.grid.assign(x_grid.begin(), x_grid.end());
    g.re.resize(x_grid.size());
    g.im.resize(x_grid.size());
    double x_max = 0.0;
    for (double x : x_grid) x_max = std::max(x_max, std::fabs(x));

    for (std::size_t j = 0; j < x_grid.size(); ++j) {
        const double x = x_grid[j];
        double re = 0.0, im = 0.0;
        for (const Node& n : nodes) {
            re += n.weight * n.value * std::cos(n.t * x);
            im -= n.weight * n.odd * std::sin(n.t * x);
        }
        // Euler-Maclaurin end corrections h^2/12 (phi'(b) - phi'(a)) per panel,
        // phi(t) = g^(t) cos(tx), one-sided at the kink.
        for (std::size_t k = 0; k < panels.size(); ++k) {
            const Panel& p = panels[k];
            auto dphi = [&](double t) {
                const double v = std::exp(-p.P(t));
                return -p.dP(t) * v * std::cos(t * x) - x * v * std::sin(t * x);
            };
            re -= hs[k] * hs[k] / 12.0 * (dphi(p.b) - dphi(p.a));
        }
        g.re[j] = re / std::numbers::pi;
        g.im[j] = im / (2.0 * std::numbers::pi);
    }

    const Panel& last = panels.back();
    g.truncation_bound = std::exp(-last.P(T)) / last.dP(T) / std::numbers::pi;
    for (std::size_t k = 0; k < panels.size(); ++k)
        g.discretization_bound += discretisation_bound(panels[k], hs[k], x_max) / std::numbers::pi;
    double mass = 0.0;
    for (const Node& n : nodes) mass += n.weight * n.value;
    g.rounding_bound = 4.0 * static_cast<double>(nodes.size()) * std::numeric_limits<double>::epsilon() * mass;
    if (!(g.error_bound() <= budget.tolerance))
        throw ResourceLimitError("insufficient quadrature budget: error bound " + std::to_string(g.error_bound()) +
                                 " exceeds tolerance " + std::to_string(budget.tolerance));

    res.f.resize(x_grid.size());
    res.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
        res.f[j] = 0.5 * std::exp(-std::fabs(y)) * g.re[j];
        if (g.re[j] < res.min_value) res.min_value = g.re[j], res.argmin = x_grid[j];
        res.max_imag = std::max(res.max_imag, std::fabs(g.im[j]));
    }
    return res;
}

CauchyIdentity cauchy_cf_identity(double w, double T, double step) {
    require(std::isfinite(w), "w must be finite");
    require(T >= 10.0 && step > 0.0, "Cauchy quadrature needs T >= 10 and a positive step");
    const double a = std::fabs(w);
    const auto n = static_cast<std::size_t>(std::ceil(T / step));
    const double h = T / static_cast<double>(n);
    // phi(s) = cos(a s) / (1 + s^2) on [0, T]; the integral over R is 2/pi times int_0^inf phi.
    double sum = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = i == n ? T : static_cast<double>(i) * h;
        const double wgt = (i == 0 || i == n) ? 0.5 : 1.0;
        sum += wgt * std::cos(a * s) / (1.0 + s * s);
    }
    sum *= h;
    auto dphi = [&](double s) {
        const double d = 1.0 + s * s;
        return -a * std::sin(a * s) / d - 2.0 * s * std::cos(a * s) / (d * d);
    };
    sum -= h * h / 12.0 * (dphi(T) - dphi(0.0));

    double tail = 0.0, tail_bound = 0.0;
    const double d = 1.0 + T * T;
    if (a == 0.0) {
        tail = std::numbers::pi / 2.0 - std::atan(T);
    } else {
        tail = -std::sin(a * T) / (a * d) + 2.0 * T * std::cos(a * T) / (a * a * d * d);
        // Remaining term: (2/a^2) int_T^inf cos(as) (s/(1+s^2)^2)' ds, and s/(1+s^2)^2 decreases for s > 1.
        tail_bound = 2.0 / (a * a) * T / (d * d);
    }
    // |(cos(as)/(1+s^2))''''| <= sum_k C(4,k) a^(4-k) k!, since |(1/(1+s^2))^(k)| <= k!.
    const double deriv = std::pow(a, 4) + 4.0 * std::pow(a, 3) + 12.0 * a * a + 24.0 * a + 24.0;
    const double disc_bound = std::pow(h, 4) / 720.0 * T * deriv;

    CauchyIdentity r;
    r.w = w;
    r.integral = 2.0 / std::numbers::pi * (sum + tail);
    r.exact = std::exp(-a);
    r.error = std::fabs(r.integral - r.exact);
    r.error_bound = 2.0 / std::numbers::pi * (disc_bound + tail_bound) +
                    4.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    return r;
}

}  // namespace roulette::analytic
