#pragma once

// The bivariate characteristic function
//   f^(t, s) = exp(-2|t| - t^2 + i t^2 s) / (1 + s^2),
// the one-dimensional factor
//   g^(t) = exp(-2|t| - t^2 - |t^2 - y| + |y|)
// whose inverse Fourier transform g gives the density f(x, y) = e^{-|y|} g(x) / 2,
// and the Cauchy characteristic-function identity used to reach it.

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace roulette::analytic {

std::complex<double> joint_cf(double t, double s) noexcept;

/// | |f^(t,s)| - |f^(t,0)| |f^(0,s)| |.
double cf_modulus_identity(double t, double s) noexcept;

/// g^ at t for the given y, from its defining formula.
double ghat(double t, double y) noexcept;

struct PolyaViolation {
    std::string property;  ///< "origin", "even", "nonincreasing", "convex" or "vanishing"
    double t = 0.0;        ///< where the worst violation occurs
    double value = 0.0;    ///< offending difference (or value)
    std::size_t count = 0; ///< grid locations violating the property
};

struct PolyaReport {
    double y = 0.0;
    bool origin = false;        ///< g^(0) == 1 exactly
    bool even = false;          ///< g^(-t) == g^(t) on the grid
    bool nonincreasing = false; ///< first differences <= tolerance
    bool convex = false;        ///< successive slopes nondecreasing within tolerance
    bool vanishing = false;     ///< g^(t_max) <= tail_tolerance
    std::vector<PolyaViolation> violations;

    bool passed() const noexcept { return origin && even && nonincreasing && convex && vanishing; }
};

/// t_grid strictly increasing, nonnegative, starting at 0.
PolyaReport polya_check(double y, std::span<const double> t_grid, double tolerance = 1e-12,
                        double tail_tolerance = 1e-8);

/// Uniform grid lo, lo + step, ..., hi (hi included when it falls on the grid).
std::vector<double> uniform_grid(double lo, double hi, double step);

/// Sampled function with the error bounds of the quadrature that produced it.
struct GridFunction {
    std::vector<double> grid;
    std::vector<double> re;
    std::vector<double> im;
    double truncation_bound = 0.0;
    double discretization_bound = 0.0;
    double rounding_bound = 0.0;

    double error_bound() const noexcept { return truncation_bound + discretization_bound + rounding_bound; }
};

struct QuadratureBudget {
    double T = 0.0;       ///< truncation point; 0 selects 8 + sqrt(|y|)
    double step = 1e-3;
    double tolerance = 1e-9;
};

struct InverseFourierResult {
    double y = 0.0;
    GridFunction g;            ///< g(x) = (1/2pi) int g^(t) e^{-itx} dt
    std::vector<double> f;     ///< f(x, y) = e^{-|y|} g(x) / 2
    double min_value = 0.0;
    double argmin = 0.0;
    double max_imag = 0.0;     ///< from the odd part of g^ on the node set
};

/// Corrected composite trapezoid on [0, T] with a node at sqrt(y) when y > 0,
/// where g^ has a kink. The discretisation bound comes from the
/// Euler-Maclaurin remainder h^4/720 int |phi''''| and the truncation bound
/// from the Gaussian envelope. Throws ResourceLimitError when the total bound
/// exceeds budget.tolerance.
InverseFourierResult inverse_fourier_nonneg(double y, std::span<const double> x_grid, QuadratureBudget budget = {});

struct CauchyIdentity {
    double w = 0.0;
    double integral = 0.0;
    double exact = 0.0;        ///< e^{-|w|}
    double error = 0.0;        ///< |integral - exact|
    double error_bound = 0.0;  ///< a priori bound on the quadrature error
};

/// int e^{isw} / (pi (1 + s^2)) ds by corrected trapezoid on [0, T] plus an
/// analytic tail: exact (arctan) for w = 0, two integrations by parts otherwise.
CauchyIdentity cauchy_cf_identity(double w, double T = 200.0, double step = 1e-3);

}  // namespace roulette::analytic
