#include "roulette/analytic/functional_equation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "roulette/common.hpp"

namespace roulette::analytic {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* model_name(ModelId id) noexcept {
    switch (id) {
        case ModelId::exponential: return "exponential";
        case ModelId::normal_half_var: return "normal_half_var";
        case ModelId::laplace: return "laplace";
        case ModelId::half_normal: return "half_normal";
    }
    return "?";
}

ModelId parse_model(const std::string& name) {
    for (ModelId id : {ModelId::exponential, ModelId::normal_half_var, ModelId::laplace, ModelId::half_normal})
        if (name == model_name(id)) return id;
    throw ValidationError("unknown density model: " + name);
}

DensityModel density_model(ModelId id) {
    DensityModel m;
    m.id = id;
    switch (id) {
        case ModelId::exponential:
            m.A = 1.0;
            m.support_lo = 0.0;
            m.support_hi = kInf;
            break;
        case ModelId::normal_half_var:
            m.A = 1.0 / std::numbers::sqrt2;
            m.support_lo = -kInf;
            m.support_hi = kInf;
            break;
        case ModelId::laplace:
            m.A = 1.0;
            m.support_lo = -kInf;
            m.support_hi = kInf;
            break;
        case ModelId::half_normal:
            m.A = 1.0 / std::numbers::sqrt2;
            m.support_lo = 0.0;
            m.support_hi = kInf;
            break;
    }
    return m;
}

double DensityModel::f(double x) const noexcept {
    if (!(x >= support_lo && x < support_hi)) return 0.0;
    switch (id) {
        case ModelId::exponential: return std::exp(-x);
        case ModelId::normal_half_var: return std::exp(-x * x) * std::numbers::inv_sqrtpi;
        case ModelId::laplace: return 0.5 * std::exp(-std::fabs(x));
        case ModelId::half_normal: return 2.0 * std::exp(-x * x) * std::numbers::inv_sqrtpi;
    }
    return 0.0;
}

double DensityModel::g(double v) const noexcept {
    switch (id) {
        case ModelId::exponential:
        case ModelId::laplace: return -std::fabs(v);
        case ModelId::normal_half_var:
        case ModelId::half_normal: return 0.0;
    }
    return 0.0;
}

double DensityModel::h(double v) const noexcept {
    const double a = std::fabs(v);
    switch (id) {
        case ModelId::exponential: return 0.5 * std::exp(-a);
        case ModelId::normal_half_var: return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
        case ModelId::laplace: return 0.25 * (1.0 + a) * std::exp(-a);
        case ModelId::half_normal:
            return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * v * v) * std::erfc(a / std::numbers::sqrt2);
    }
    return 0.0;
}

FeqSides feq_sides(const DensityModel& m, double u, double v) noexcept {
    return {m.f(0.5 * (u + v)) * m.f(0.5 * (u - v)), 2.0 * m.A * m.f(m.A * u + m.g(v)) * m.h(v)};
}

double feq_residual(const DensityModel& m, double u, double v) noexcept {
    const FeqSides s = feq_sides(m, u, v);
    return std::fabs(s.lhs - s.rhs);
}

ConstancyProbe feq_constancy_probe(const DensityModel& m, double v, std::span<const double> u_grid) {
    require(v > 0.0, "constancy probe needs v > 0");
    ConstancyProbe p;
    double lmin = kInf, lmax = -kInf, rmin = kInf, rmax = -kInf;
    for (double u : u_grid) {
        if (!(u > -v && u < v)) continue;
        const FeqSides s = feq_sides(m, u, v);
        lmin = std::min(lmin, s.lhs);
        lmax = std::max(lmax, s.lhs);
        rmin = std::min(rmin, s.rhs);
        rmax = std::max(rmax, s.rhs);
        ++p.points;
    }
    require(p.points >= 2, "constancy probe needs two grid points inside (-v, v)");
    p.lhs_spread = lmax - lmin;
    p.rhs_spread = rmax - rmin;
    return p;
}

FeqSides half_normal_violation(double u, double v) {
    require(u > 0.0 && u < std::fabs(v), "half-normal violation needs 0 < u < |v|");
    return feq_sides(density_model(ModelId::half_normal), u, v);
}

double alpha_probe(double alpha, double A, double g_of_v, double v, std::span<const double> u_grid) {
    require(alpha > 0.0, "alpha must be positive");
    require(!u_grid.empty(), "u grid is empty");
    double lo = kInf, hi = -kInf;
    for (double u : u_grid) {
        require(u > v, "alpha probe needs u > v");
        const double base = 2.0 * A * u + 2.0 * g_of_v;
        require(base > 0.0, "alpha probe needs 2Au + 2g > 0");
        const double d = std::pow(u + v, alpha) + std::pow(u - v, alpha) - std::pow(base, alpha);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return hi - lo;
}

}  // namespace roulette::analytic
