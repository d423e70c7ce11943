#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "roulette/analytic/charfn.hpp"
#include "roulette/analytic/functional_equation.hpp"
#include "roulette/common.hpp"
#include "roulette/rng/philox.hpp"

using namespace roulette;
using namespace roulette::analytic;

namespace {

// Composite Simpson on [a, b] with n (even) cells.
template <class F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("density models integrate to one and have even V-densities") {
    for (ModelId id : {ModelId::exponential, ModelId::normal_half_var, ModelId::laplace, ModelId::half_normal}) {
        const DensityModel m = density_model(id);
        const double lo = std::isfinite(m.support_lo) ? m.support_lo : -40.0;
        INFO(std::string(model_name(id)));
        const double mass = simpson([&](double x) { return m.f(x); }, lo, 40.0, 400000);
        CHECK(std::abs(mass - 1.0) < 1e-10);
        const double vmass = simpson([&](double v) { return m.h(v); }, -40.0, 40.0, 400000);
        // The exponential and Laplace V-densities have kinks at 0, which is a grid node.
        CHECK(std::abs(vmass - 1.0) < 1e-9);
        for (double v : {0.1, 0.7, 2.5}) CHECK(m.h(v) == m.h(-v));
        CHECK(parse_model(model_name(id)) == id);
    }
    CHECK_THROWS_AS(parse_model("cauchy"), ValidationError);
}

TEST_CASE("V-densities agree with the convolution integral") {
    for (ModelId id : {ModelId::exponential, ModelId::normal_half_var, ModelId::laplace, ModelId::half_normal}) {
        const DensityModel m = density_model(id);
        for (double v : {0.0, 0.5, 1.3, 3.0}) {
            // h(v) = int f(t + v) f(t) dt; start at the support edge so Simpson sees a smooth integrand.
            const double lo = std::isfinite(m.support_lo) ? m.support_lo : -30.0;
            const double conv = simpson([&](double t) { return m.f(t + v) * m.f(t); }, lo, 30.0, 600000);
            INFO(std::string(model_name(id)), " v=", v);
            CHECK(conv == doctest::Approx(m.h(v)).epsilon(1e-6));
        }
    }
}

TEST_CASE("functional equation: exponential and normal solve it") {
    const DensityModel e = density_model(ModelId::exponential);
    const FeqSides s = feq_sides(e, 3.0, 1.0);
    CHECK(s.lhs == doctest::Approx(std::exp(-3.0)));
    CHECK(s.rhs == doctest::Approx(2.0 * std::exp(-2.0) * 0.5 * std::exp(-1.0)));
    CHECK(feq_residual(e, 3.0, 1.0) < 1e-16);

    const DensityModel n = density_model(ModelId::normal_half_var);
    double worst_e = 0.0, worst_n = 0.0;
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; j <= 100; ++j) {
            const double u = -5.0 + 0.1 * i, v = -5.0 + 0.1 * j;
            worst_e = std::max(worst_e, feq_residual(e, u, v));
            worst_n = std::max(worst_n, feq_residual(n, u, v));
        }
    CHECK(worst_e < 1e-12);
    CHECK(worst_n < 1e-12);
}

TEST_CASE("functional equation: Laplace and half-normal do not") {
    const DensityModel l = density_model(ModelId::laplace);
    const double r = feq_residual(l, 0.0, 2.0);
    CHECK(r == doctest::Approx(std::exp(-2.0) / 4.0 - 0.75 * std::exp(-4.0)).epsilon(1e-12));
    CHECK(r > 1e-2);

    std::vector<double> grid;
    for (int i = -200; i <= 200; ++i) grid.push_back(i * 0.01);
    const ConstancyProbe lp = feq_constancy_probe(l, 1.0, grid);
    CHECK(lp.lhs_spread < 1e-16);
    CHECK(lp.rhs_spread > 0.1);
    CHECK(lp.points == 199);
    const ConstancyProbe np = feq_constancy_probe(density_model(ModelId::normal_half_var), 1.0, grid);
    CHECK(np.lhs_spread == doctest::Approx(np.rhs_spread).epsilon(1e-12));
    CHECK_THROWS_AS(feq_constancy_probe(l, 0.0, grid), ValidationError);

    for (auto [u, v] : {std::pair{0.5, 1.0}, std::pair{0.1, 0.5}, std::pair{0.3, -2.0}}) {
        const FeqSides s = half_normal_violation(u, v);
        CHECK(s.lhs == 0.0);
        CHECK(s.rhs > 0.0);
    }
    CHECK_THROWS_AS(half_normal_violation(2.0, 1.0), ValidationError);
    CHECK_THROWS_AS(half_normal_violation(0.0, 1.0), ValidationError);
}

TEST_CASE("alpha probe separates alpha in {1, 2} from the rest") {
    auto grid = [](double v) {
        std::vector<double> g;
        for (int i = 0; i <= 970; ++i) g.push_back(v + 3.0 + 0.1 * i);
        return g;
    };
    const auto g1 = grid(1.0);
    CHECK(alpha_probe(2.0, 1.0 / std::numbers::sqrt2, 0.0, 1.0, g1) < 1e-10);
    CHECK(alpha_probe(1.0, 1.0, -1.0, 1.0, g1) < 1e-10);

    std::vector<double> wide;
    for (int i = 0; i <= 98; ++i) wide.push_back(2.0 + i);
    const double a3 = std::pow(2.0, -2.0 / 3.0);
    CHECK(std::pow(2.0 * a3, 3.0) == doctest::Approx(2.0));
    CHECK(alpha_probe(3.0, a3, 0.0, 1.0, wide) > 1.0);

    // At v = 2 every non-solution exponent moves D by more than 0.05 over [v+3, v+100].
    const double v = 2.0;
    const auto g2 = grid(v);
    for (double alpha : {0.5, 1.5, 3.0}) {
        const double A = 0.5 * std::pow(2.0, 1.0 / alpha);
        for (double gv : {0.0, -v}) {
            INFO("alpha=", alpha, " g=", gv);
            CHECK(alpha_probe(alpha, A, gv, v, g2) > 0.05);
        }
    }
    CHECK_THROWS_AS(alpha_probe(2.0, 1.0, 0.0, 1.0, std::vector<double>{0.5}), ValidationError);
}

TEST_CASE("joint characteristic function modulus factorises") {
    CHECK(joint_cf(0, 0) == std::complex<double>(1.0, 0.0));
    CHECK(cf_modulus_identity(0, 0) == 0.0);
    CHECK(std::abs(joint_cf(1, 1)) == doctest::Approx(std::exp(-3.0) / 2.0));
    CHECK(cf_modulus_identity(1, 1) < 1e-16);
    rng::Stream s(3, 0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double t = 10.0 * s.next_double() - 5.0, u = 200.0 * s.next_double() - 100.0;
        worst = std::max(worst, cf_modulus_identity(t, u));
    }
    CHECK(worst < 1e-14);
    // X and Y are dependent: f^(t,s) differs from f^(t,0) f^(0,s).
    CHECK(std::abs(joint_cf(1, 1) - joint_cf(1, 0) * joint_cf(0, 1)) > 1e-2);
}

TEST_CASE("g^ branches") {
    CHECK(ghat(0.5, 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(ghat(2.0, 1.0) == doctest::Approx(std::exp(-10.0)));
    for (double t : {0.0, 0.3, 1.7}) {
        CHECK(ghat(t, -1.0) == doctest::Approx(std::exp(-2 * t - 2 * t * t)));
        CHECK(ghat(-t, -1.0) == ghat(t, -1.0));
    }
}

TEST_CASE("Polya properties of g^: the kink at sqrt(y) is concave") {
    const auto grid = uniform_grid(0.0, 20.0, 1e-3);
    REQUIRE(grid.size() == 20001);
    for (double y : {0.1, 1.0, 10.0}) {
        const PolyaReport r = polya_check(y, grid);
        INFO("y=", y);
        CHECK(r.origin);
        CHECK(r.even);
        CHECK(r.nonincreasing);
        CHECK(r.vanishing);
        // Left slope -2 g^, right slope -(2 + 4 sqrt y) g^: the slope drops at sqrt(y).
        CHECK_FALSE(r.convex);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].property == "convex");
        CHECK(r.violations[0].t == doctest::Approx(std::sqrt(y)).epsilon(2e-3));
        CHECK(r.violations[0].count <= 2);
        CHECK_FALSE(r.passed());
    }
    const PolyaReport neg = polya_check(-1.0, grid);
    CHECK(neg.passed());
    CHECK_THROWS_AS(polya_check(1.0, std::vector<double>{0.1, 0.2, 0.3}), ValidationError);
    CHECK_THROWS_AS(polya_check(1.0, std::vector<double>{0.0, 0.2, 0.2}), ValidationError);
}

TEST_CASE("inverse Fourier transform of g^ is a nonnegative density") {
    const auto xs = uniform_grid(-20.0, 20.0, 0.05);
    for (double y : {-1.0, 0.1, 1.0, 10.0}) {
        const InverseFourierResult r = inverse_fourier_nonneg(y, xs);
        INFO("y=", y);
        CHECK(r.g.error_bound() < 1e-9);
        CHECK(r.min_value >= -1e-8);
        CHECK(r.max_imag < 1e-15);
        // int g = g^(0) = 1; g decays like x^-2 so the box misses about (2/pi)/(20 * 2).
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) mass += 0.5 * (r.g.re[i] + r.g.re[i + 1]) * 0.05;
        CHECK(mass == doctest::Approx(1.0).epsilon(0.05));
        CHECK(r.f[400] == doctest::Approx(0.5 * std::exp(-std::fabs(y)) * r.g.re[400]));
    }
}

TEST_CASE("inverse Fourier at y <= 0 matches an independent Simpson integration") {
    const std::vector<double> xs{-3.0, 0.0, 0.7, 5.0};
    const InverseFourierResult r = inverse_fourier_nonneg(-1.0, xs);
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double ref =
            simpson([&](double t) { return std::exp(-2 * t - 2 * t * t) * std::cos(t * xs[j]); }, 0.0, 12.0, 200000) /
            std::numbers::pi;
        CHECK(r.g.re[j] == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("insufficient quadrature budget is reported") {
    const auto xs = uniform_grid(-20.0, 20.0, 1.0);
    QuadratureBudget coarse;
    coarse.step = 0.2;
    CHECK_THROWS_AS(inverse_fourier_nonneg(1.0, xs, coarse), ResourceLimitError);
    QuadratureBudget short_range;
    short_range.T = 1.5;
    CHECK_THROWS_AS(inverse_fourier_nonneg(1.0, xs, short_range), ResourceLimitError);
}

TEST_CASE("Cauchy characteristic function") {
    for (double w : {0.0, 1.0, -1.0, 2.0, -2.0, 5.0}) {
        const CauchyIdentity c = cauchy_cf_identity(w);
        INFO("w=", w);
        CHECK(c.error < 1e-8);
        CHECK(c.error <= c.error_bound + 1e-15);
        CHECK(c.error_bound < 1e-6);
    }
    CHECK(cauchy_cf_identity(2.0).integral == doctest::Approx(0.1353352832).epsilon(1e-8));
    CHECK(cauchy_cf_identity(2.0).integral == cauchy_cf_identity(-2.0).integral);
}
