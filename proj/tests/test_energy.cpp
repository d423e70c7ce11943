#include <cmath>
#include <numbers>

#include "doctest.h"
#include "roulette/common.hpp"
#include "roulette/energy/dcov.hpp"
#include "roulette/energy/intro_density.hpp"
#include "roulette/kernels/kernels.hpp"
#include "support/oracles.hpp"

using namespace roulette;
using namespace roulette::energy;

namespace {

PairedSample random_sample(std::size_t m, std::uint64_t seed, bool ties = false) {
    rng::Stream s(seed, 0);
    PairedSample p;
    for (std::size_t i = 0; i < m; ++i) {
        double x = 4.0 * s.next_double() - 2.0;
        double y = x * x + s.next_double();
        if (ties) {
            x = std::round(x);
            y = std::round(y);
        }
        p.xs.push_back(x);
        p.ys.push_back(y);
    }
    return p;
}

PairedSample independent_uniform(std::size_t m, std::uint64_t seed) {
    rng::Stream s(seed, 0);
    PairedSample p;
    for (std::size_t i = 0; i < m; ++i) {
        p.xs.push_back(s.next_double());
        p.ys.push_back(s.next_double());
    }
    return p;
}

}  // namespace

TEST_CASE("dCov^2 of the two-point sample") {
    PairedSample s{{0, 1}, {0, 1}};
    CHECK(dcov2_vstat(s) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(oracle::dcov2_triple_sum(s.xs, s.ys) == doctest::Approx(0.25));
    PairedSample c{{3, 3, 3, 3}, {1, 2, 5, 7}};
    CHECK(dcov2_vstat(c) == 0.0);
    CHECK_THROWS_AS(dcov2_vstat(PairedSample{{1}, {1}}), ValidationError);
    CHECK_THROWS_AS(dcov2_vstat(PairedSample{{1, 2}, {1}}), ValidationError);
    CHECK_THROWS_AS(dcov2_vstat(PairedSample{{1, NAN}, {1, 2}}), ValidationError);
}

TEST_CASE("double-centred dCov^2 equals the triple-sum form") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t m = 2 + seed % 49;
        const PairedSample s = random_sample(m, seed, seed % 5 == 0);
        const double fast = dcov2_vstat(s);
        const double slow = oracle::dcov2_triple_sum(s.xs, s.ys);
        CHECK(std::abs(fast - slow) <= 1e-12);
        CHECK(fast >= -1e-12);
    }
}

TEST_CASE("dCov^2 symmetry, translation and scaling") {
    const PairedSample s = random_sample(37, 5);
    const double base = dcov2_vstat(s);
    CHECK(dcov2_vstat(s.ys, s.xs) == doctest::Approx(base).epsilon(1e-12));
    PairedSample t = s;
    for (auto& x : t.xs) x = -2.5 * x + 7.0;
    for (auto& y : t.ys) y = 0.3 * y - 1.0;
    CHECK(dcov2_vstat(t) == doctest::Approx(base * 2.5 * 0.3).epsilon(1e-10));
}

TEST_CASE("dCov^2 does not depend on threads or ISA") {
    const PairedSample s = random_sample(1000, 3);
    const double one = dcov2_vstat(s, 1);
    CHECK(dcov2_vstat(s, 3) == one);
    CHECK(dcov2_vstat(s, 8) == one);
    if (kernels::isa_supported(kernels::Isa::avx2)) {
        const auto active = kernels::active_isa();
        kernels::set_isa(kernels::Isa::scalar);
        const double scalar = dcov2_vstat(s, 2);
        kernels::set_isa(kernels::Isa::avx2);
        const double vector = dcov2_vstat(s, 2);
        kernels::set_isa(active);
        CHECK(scalar == vector);
    }
}

TEST_CASE("dCor") {
    const PairedSample s = random_sample(200, 8);
    PairedSample same{s.xs, s.xs};
    CHECK(dcor(same).value == doctest::Approx(1.0).epsilon(1e-12));
    PairedSample flipped{s.xs, s.xs};
    for (auto& y : flipped.ys) y = -y;
    CHECK(dcor(flipped).value == doctest::Approx(1.0).epsilon(1e-12));
    PairedSample affine{s.xs, s.xs};
    for (auto& y : affine.ys) y = -3.7 * y + 11.0;
    CHECK(std::abs(dcor(affine).value - 1.0) <= 1e-10);

    const DcorResult r = dcor(s);
    CHECK(r.value > 0.0);
    CHECK(r.value < 1.0);
    CHECK_FALSE(r.clipped);
    PairedSample moved = s;
    for (auto& x : moved.xs) x = 5.0 * x - 1.0;
    for (auto& y : moved.ys) y = -0.2 * y + 3.0;
    CHECK(std::abs(dcor(moved).value - r.value) <= 1e-10);

    PairedSample flat{s.xs, std::vector<double>(s.size(), 2.0)};
    CHECK_THROWS_AS(dcor(flat), DegenerateMarginal);
    PairedSample flat_x{std::vector<double>(s.size(), -1.0), s.ys};
    CHECK_THROWS_AS(dcor(flat_x), DegenerateMarginal);
}

TEST_CASE("permutation test") {
    const PairedSample s = random_sample(100, 2);
    PairedSample same{s.xs, s.xs};
    const PermutationResult r = perm_test_dcor(same, 999, 1);
    CHECK(r.at_least == 0);
    CHECK(r.p_value == doctest::Approx(1.0 / 1000.0));
    CHECK_THROWS_AS(perm_test_dcor(s, 98), ValidationError);

    const PermutationResult a = perm_test_dcor(s, 199, 4, 1);
    const PermutationResult b = perm_test_dcor(s, 199, 4, 3);
    CHECK(a.p_value == b.p_value);
    CHECK(a.statistic == b.statistic);
}

TEST_CASE("permutation test is calibrated under independence") {
    int rejections = 0;
    const int runs = 200;
    for (int run = 0; run < runs; ++run) {
        const PairedSample s = independent_uniform(60, 1000 + run);
        if (perm_test_dcor(s, 99, run).p_value <= 0.05) ++rejections;
    }
    // Binomial(200, 0.05): mean 10, sd ~3.1.
    CHECK(rejections >= 2);
    CHECK(rejections <= 22);
}

TEST_CASE("covariance of symmetrised absolute differences") {
    const PairedSample s = random_sample(300, 12);
    PairedSample same{s.xs, s.xs};
    const double v = cov_sym_abs_diff(same);
    // Equals the variance of |X - X'| over the pairs.
    const std::size_t m = s.size();
    double sum = 0.0, sum2 = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = std::fabs(s.xs[i] - s.xs[j]);
            sum += d;
            sum2 += d * d;
            pairs += 1.0;
        }
    CHECK(v == doctest::Approx(sum2 / pairs - (sum / pairs) * (sum / pairs)).epsilon(1e-10));
    CHECK(v > 0.0);
    CHECK(cov_sym_abs_diff(s, 1) == cov_sym_abs_diff(s, 4));

    const CovEstimate ind = cov_sym_abs_diff_bootstrap(independent_uniform(1000, 77), 100, 3);
    CHECK(std::abs(ind.value) <= 4.0 * ind.bootstrap_stderr);
    CHECK(ind.bootstrap_stderr > 0.0);
    CHECK_THROWS_AS(cov_sym_abs_diff(PairedSample{{1}, {2}}), ValidationError);
}

TEST_CASE("intro density definition") {
    const double c = kIntroC;
    CHECK(c == doctest::Approx(0.41421356237));
    CHECK(intro_q(0.1) == 0.5);
    CHECK(intro_q(-0.5) == -c / 2);
    CHECK(intro_q(0.9) == 0.0);
    CHECK(intro_q(0.0) == -c / 2);
    CHECK(intro_q(c) == 0.5);
    CHECK(intro_density(0.9, 0.9) == 0.25);
    CHECK(intro_density(-0.5, 0.1) == doctest::Approx(kIntroEnvelope));
    CHECK(intro_density(1.5, 0.0) == 0.0);

    // Exact cell integrals: q and p are constant on the cells cut at -1, 0, c, 1.
    const double cuts[] = {-1.0, 0.0, c, 1.0};
    double mass = 0.0, qmass = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double wx = cuts[i + 1] - cuts[i], mx = 0.5 * (cuts[i] + cuts[i + 1]);
        qmass += intro_q(mx) * wx;
        for (int j = 0; j < 3; ++j) {
            const double wy = cuts[j + 1] - cuts[j], my = 0.5 * (cuts[j] + cuts[j + 1]);
            mass += intro_density(mx, my) * wx * wy;
        }
    }
    CHECK(std::abs(mass - 1.0) < 1e-12);
    CHECK(std::abs(qmass) < 1e-15);

    double min_p = 1.0;
    for (int i = 0; i <= 2000; ++i)
        for (int j = 0; j <= 2000; j += 7) min_p = std::min(min_p, intro_density(-1 + i * 1e-3, -1 + j * 1e-3));
    CHECK(min_p >= 0.0);
}

TEST_CASE("zero covariance of the intro density from two integration routes") {
    const auto exact = oracle::intro_integrals_exact(kIntroC);
    CHECK(std::abs(exact.cov()) < 1e-15);
    CHECK(exact.K == doctest::Approx(kIntroC * (kIntroC * kIntroC - 1.0) / 6.0));
    // The jump of q at c is off the grid, so the midpoint rule is first order.
    const auto mid = oracle::intro_integrals_midpoint(intro_q, 3000);
    CHECK(mid.K == doctest::Approx(exact.K).epsilon(5e-3));
    CHECK(mid.J == doctest::Approx(exact.J).epsilon(5e-3));
    CHECK(std::abs(mid.cov()) < 5e-5);
}

TEST_CASE("intro density sampler") {
    const IntroSample a = sample_intro_density(20000, 5);
    REQUIRE(a.sample.size() == 20000);
    CHECK(a.acceptance_rate() == doctest::Approx(1.0 / (1.0 + kIntroC)).epsilon(0.02));
    const IntroSample b = sample_intro_density(20000, 5);
    CHECK(a.sample.xs == b.sample.xs);
    // Uniform marginals: means near 0, second moments near 1/3.
    double mx = 0.0, my = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < a.sample.size(); ++i) {
        mx += a.sample.xs[i];
        my += a.sample.ys[i];
        sx += a.sample.xs[i] * a.sample.xs[i];
    }
    CHECK(std::abs(mx / 20000) < 0.02);
    CHECK(std::abs(my / 20000) < 0.02);
    CHECK(sx / 20000 == doctest::Approx(1.0 / 3.0).epsilon(0.03));
    // Dependence: P(X > 0, Y in (0,c]) differs from the product of marginals.
    double joint = 0.0, px = 0.0, py = 0.0;
    for (std::size_t i = 0; i < a.sample.size(); ++i) {
        const bool ax = a.sample.xs[i] > 0 && a.sample.xs[i] <= kIntroC;
        const bool ay = a.sample.ys[i] > 0 && a.sample.ys[i] <= kIntroC;
        joint += ax && ay;
        px += ax;
        py += ay;
    }
    // Exact: c^2/4 - c^2/4 = 0 for the cell (0,c]^2, against (c/2)^2 under independence.
    CHECK(joint / 20000 < 0.25 * (px / 20000) * (py / 20000));
    CHECK_THROWS_AS(sample_intro_density(0), ValidationError);
}
