#pragma once

// The functional equation
//   f((u+v)/2) f((u-v)/2) = 2A f(Au + g(v)) h(v)
// for the density f of X where X, Y are iid, U = X + Y, V = X - Y and h is
// the density of V. The exponential and N(0, 1/2) models satisfy it; the
// Laplace and half-normal models with the candidate (A, g) below do not.

#include <span>
#include <string>

namespace roulette::analytic {

enum class ModelId { exponential, normal_half_var, laplace, half_normal };

const char* model_name(ModelId id) noexcept;
ModelId parse_model(const std::string& name);

struct DensityModel {
    ModelId id = ModelId::exponential;
    double A = 1.0;
    double support_lo = 0.0;   ///< f vanishes outside [support_lo, support_hi)
    double support_hi = 0.0;

    double f(double x) const noexcept;
    /// Candidate shift; even in v.
    double g(double v) const noexcept;
    /// Density of X - Y.
    double h(double v) const noexcept;
};

/// exponential: f = e^{-u} on (0, inf), A = 1, g = -|v|, h = e^{-|v|}/2.
/// normal_half_var: f = N(0, 1/2), A = 1/sqrt 2, g = 0, h = N(0, 1).
/// laplace: f = e^{-|u|}/2, A = 1, g = -|v|, h = (1 + |v|) e^{-|v|}/4.
/// half_normal: f = 2 N(0, 1/2) on (0, inf), A = 1/sqrt 2, g = 0,
///   h = sqrt(2/pi) e^{-v^2/2} erfc(|v|/sqrt 2).
DensityModel density_model(ModelId id);

struct FeqSides {
    double lhs = 0.0;
    double rhs = 0.0;
};

FeqSides feq_sides(const DensityModel& m, double u, double v) noexcept;

/// |lhs - rhs|; outside the support both sides may be 0.
double feq_residual(const DensityModel& m, double u, double v) noexcept;

struct ConstancyProbe {
    double lhs_spread = 0.0;   ///< max - min of the left side over u in (-v, v)
    double rhs_spread = 0.0;
    std::size_t points = 0;    ///< grid points strictly inside (-v, v)
};

/// Requires v > 0 and at least two grid points inside (-v, v).
ConstancyProbe feq_constancy_probe(const DensityModel& m, double v, std::span<const double> u_grid);

/// Half-normal sides at 0 < u < |v|, where the left side is 0 and the right positive.
FeqSides half_normal_violation(double u, double v);

/// max - min over u_grid of D(u) = (u+v)^a + (u-v)^a - (2Au + 2g)^a.
/// Requires every u > v and 2Au + 2g > 0.
double alpha_probe(double alpha, double A, double g_of_v, double v, std::span<const double> u_grid);

}  // namespace roulette::analytic
