#include "roulette/exact/survivor_pmf.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "roulette/common.hpp"
#include "roulette/parallel.hpp"

namespace roulette::exact {

namespace {

mpz_class power(unsigned long base, unsigned long exponent) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, exponent);
    return r;
}

mpz_class binomial(unsigned long n, unsigned long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

/// T_l = C(n,l) (n-l)^l (n-l-1)^(n-l) for l = 0..n-2, the numerators of
/// C(n,l) E(Y_1 ... Y_l) over (n-1)^n.
std::vector<mpz_class> waring_terms(unsigned n) {
    std::vector<mpz_class> terms(n - 1);
    for (unsigned l = 0; l + 2 <= n; ++l) terms[l] = binomial(n, l) * power(n - l, l) * power(n - l - 1, n - l);
    return terms;
}

void check_exact_size(unsigned n, unsigned exact_ceiling) {
    require(n >= 2, "survivor pmf needs n >= 2, got " + std::to_string(n));
    if (n > exact_ceiling) {
        throw ResourceLimitError("exact survivor pmf requested for n = " + std::to_string(n) +
                                 " above the exact-mode ceiling " + std::to_string(exact_ceiling));
    }
}

}  // namespace

mpq_class SurvivorPmf::probability(std::size_t k) const {
    if (k >= weights.size()) return 0;
    mpq_class q(weights[k], denominator);
    q.canonicalize();
    return q;
}

mpq_class SurvivorPmf::factorial_moment(unsigned r) const {
    mpz_class acc = 0;
    for (std::size_t k = r; k < weights.size(); ++k) {
        mpz_class falling = 1;
        for (unsigned i = 0; i < r; ++i) falling *= static_cast<unsigned long>(k - i);
        acc += falling * weights[k];
    }
    mpq_class q(acc, denominator);
    q.canonicalize();
    return q;
}

mpq_class SurvivorPmf::mean() const { return factorial_moment(1); }

mpq_class SurvivorPmf::variance() const {
    const mpq_class m = mean();
    return factorial_moment(2) + m - m * m;
}

mpq_class mixed_moment(unsigned n, unsigned l) {
    require(n >= 2, "mixed moment needs n >= 2");
    require(l >= 1 && l <= n - 1, "mixed moment needs 1 <= l <= n-1, got l = " + std::to_string(l));
    mpq_class r(power(n - l, l) * power(n - l - 1, n - l), power(n - 1, n));
    r.canonicalize();
    return r;
}

SurvivorPmf survivor_pmf(unsigned n, unsigned exact_ceiling) {
    check_exact_size(n, exact_ceiling);
    const std::vector<mpz_class> terms = waring_terms(n);
    // Horner in y = x - 1: poly <- poly * (x - 1) + T_l, for l = n-2 down to 0.
    std::vector<mpz_class> poly(n - 1);
    std::size_t degree = 0;
    poly[0] = terms[n - 2];
    for (std::size_t l = n - 2; l-- > 0;) {
        ++degree;
        for (std::size_t k = degree; k >= 1; --k) mpz_sub(poly[k].get_mpz_t(), poly[k - 1].get_mpz_t(), poly[k].get_mpz_t());
        mpz_sub(poly[0].get_mpz_t(), terms[l].get_mpz_t(), poly[0].get_mpz_t());
    }
    return {n, std::move(poly), power(n - 1, n)};
}

SurvivorPmf survivor_pmf_direct(unsigned n, unsigned threads, unsigned exact_ceiling) {
    check_exact_size(n, exact_ceiling);
    const std::vector<mpz_class> terms = waring_terms(n);
    // Pascal rows 0..n-2, shared by every k.
    std::vector<std::vector<mpz_class>> pascal(n - 1);
    for (std::size_t l = 0; l < pascal.size(); ++l) {
        pascal[l].resize(l + 1);
        pascal[l][0] = pascal[l][l] = 1;
        for (std::size_t k = 1; k < l; ++k) pascal[l][k] = pascal[l - 1][k - 1] + pascal[l - 1][k];
    }
    std::vector<mpz_class> weights(n - 1);
    parallel_chunks(weights.size(), threads, [&](std::size_t begin, std::size_t end) {
        mpz_class product;
        for (std::size_t k = begin; k < end; ++k) {
            mpz_class sum = 0;
            for (std::size_t l = k; l < terms.size(); ++l) {
                mpz_mul(product.get_mpz_t(), pascal[l][k].get_mpz_t(), terms[l].get_mpz_t());
                if ((l - k) % 2 == 0) sum += product; else sum -= product;
            }
            weights[k] = std::move(sum);
        }
    });
    return {n, std::move(weights), power(n - 1, n)};
}

SurvivorPmf brute_force_pmf(unsigned n) {
    require(n >= 2 && n <= kBruteForceMax,
            "brute-force enumeration supports 2 <= n <= " + std::to_string(kBruteForceMax));
    std::vector<unsigned long> counts(n + 1, 0);
    std::vector<unsigned> offset(n, 1);  // player i shoots (i + offset[i]) mod n
    std::vector<unsigned char> hit(n);
    while (true) {
        std::fill(hit.begin(), hit.end(), 0);
        for (unsigned i = 0; i < n; ++i) hit[(i + offset[i]) % n] = 1;
        ++counts[static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 0))];
        unsigned pos = 0;
        while (pos < n && offset[pos] == n - 1) offset[pos++] = 1;
        if (pos == n) break;
        ++offset[pos];
    }
    if (counts[n - 1] != 0 || counts[n] != 0) {
        throw InvariantViolation("enumeration produced n-1 or n survivors");
    }
    std::vector<mpz_class> weights(n - 1);
    for (unsigned k = 0; k + 1 < n; ++k) weights[k] = counts[k];
    return {n, std::move(weights), power(n - 1, n)};
}

CertifiedPmf certified_pmf(unsigned n, unsigned precision_bits) {
    require(n >= 2, "certified pmf needs n >= 2");
    require(precision_bits >= 64, "precision must be at least 64 bits");
    const auto working = static_cast<mpfr_prec_t>(n) + static_cast<mpfr_prec_t>(precision_bits);
    constexpr mpfr_prec_t kErrPrec = 64;

    const std::vector<mpz_class> terms = waring_terms(n);
    const mpz_class denominator = power(n - 1, n);
    BigFloat u(kErrPrec);
    mpfr_set_ui_2exp(u.get(), 1, -(working - 1), MPFR_RNDU);

    std::vector<BigFloat> poly(n - 1, BigFloat(working));
    std::vector<BigFloat> err(n - 1, BigFloat(kErrPrec));
    BigFloat t(working), tmp(kErrPrec);
    mpq_class ratio;

    // Normalised term t_l = T_l / (n-1)^n, one rounding.
    auto load_term = [&](std::size_t l) {
        ratio = mpq_class(terms[l], denominator);
        mpfr_set_q(t.get(), ratio.get_mpq_t(), MPFR_RNDN);
    };
    auto add_rounding = [&](std::size_t k) {
        mpfr_abs(tmp.get(), poly[k].get(), MPFR_RNDU);
        mpfr_mul(tmp.get(), tmp.get(), u.get(), MPFR_RNDU);
        mpfr_add(err[k].get(), err[k].get(), tmp.get(), MPFR_RNDU);
    };

    load_term(n - 2);
    mpfr_set(poly[0].get(), t.get(), MPFR_RNDN);
    add_rounding(0);
    std::size_t degree = 0;
    for (std::size_t l = n - 2; l-- > 0;) {
        ++degree;
        for (std::size_t k = degree; k >= 1; --k) {
            mpfr_sub(poly[k].get(), poly[k - 1].get(), poly[k].get(), MPFR_RNDN);
            mpfr_add(err[k].get(), err[k - 1].get(), err[k].get(), MPFR_RNDU);
            add_rounding(k);
        }
        load_term(l);
        // Error of t_l itself, then the subtraction.
        mpfr_abs(tmp.get(), t.get(), MPFR_RNDU);
        mpfr_mul(tmp.get(), tmp.get(), u.get(), MPFR_RNDU);
        mpfr_add(err[0].get(), err[0].get(), tmp.get(), MPFR_RNDU);
        mpfr_sub(poly[0].get(), t.get(), poly[0].get(), MPFR_RNDN);
        add_rounding(0);
    }

    CertifiedPmf out;
    out.n = n;
    out.radius.resize(n - 1);
    out.probability.reserve(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        out.radius[k] = std::max(mpfr_get_d(err[k].get(), MPFR_RNDU), DBL_TRUE_MIN);
        out.probability.push_back(std::move(poly[k]));
    }
    return out;
}

CertifiedPmf round_pmf(const SurvivorPmf& pmf, unsigned precision_bits) {
    require(precision_bits >= 64, "precision must be at least 64 bits");
    CertifiedPmf out;
    out.n = pmf.n;
    out.radius.resize(pmf.weights.size());
    out.probability.reserve(pmf.weights.size());
    const double u = unit_roundoff(precision_bits);
    for (std::size_t k = 0; k < pmf.weights.size(); ++k) {
        const mpq_class p(pmf.weights[k], pmf.denominator);
        BigFloat value(p, precision_bits);
        out.radius[k] = pmf.weights[k] == 0 ? 0.0 : std::nextafter(value.to_double(MPFR_RNDU) * u, INFINITY);
        out.probability.push_back(std::move(value));
    }
    return out;
}

ExactMoments exact_moments(unsigned n) {
    require(n >= 3, "closed-form moments need n >= 3, got " + std::to_string(n));
    const mpq_class m1(power(n - 2, n - 1), power(n - 1, n - 1));
    mpq_class m2(power(n - 2, 2) * power(n - 3, n - 2), power(n - 1, n));
    m2.canonicalize();
    ExactMoments out;
    out.mean = m1;
    out.mean.canonicalize();
    out.variance = out.mean / n + mpq_class(n - 1, n) * m2 - out.mean * out.mean;
    out.variance.canonicalize();
    return out;
}

FloatMoments certified_moments(std::uint64_t n, unsigned precision_bits) {
    require(n >= 3, "closed-form moments need n >= 3");
    const auto p = static_cast<mpfr_prec_t>(precision_bits);
    BigFloat a(p), b(p), m1(p), m2(p), tmp(p);
    mpfr_set_ui(a.get(), n - 2, MPFR_RNDN);
    mpfr_div_ui(a.get(), a.get(), n - 1, MPFR_RNDN);  // (n-2)/(n-1)
    mpfr_set_ui(b.get(), n - 3, MPFR_RNDN);
    mpfr_div_ui(b.get(), b.get(), n - 1, MPFR_RNDN);  // (n-3)/(n-1)
    mpfr_pow_ui(m1.get(), a.get(), n - 1, MPFR_RNDN);
    mpfr_pow_ui(m2.get(), b.get(), n - 2, MPFR_RNDN);
    mpfr_sqr(tmp.get(), a.get(), MPFR_RNDN);
    mpfr_mul(m2.get(), m2.get(), tmp.get(), MPFR_RNDN);
    // n Var(xi/n) = m1 + (n-1) m2 - n m1^2
    BigFloat scaled(p);
    mpfr_mul_ui(scaled.get(), m2.get(), n - 1, MPFR_RNDN);
    mpfr_add(scaled.get(), scaled.get(), m1.get(), MPFR_RNDN);
    mpfr_sqr(tmp.get(), m1.get(), MPFR_RNDN);
    mpfr_mul_ui(tmp.get(), tmp.get(), n, MPFR_RNDN);
    mpfr_sub(scaled.get(), scaled.get(), tmp.get(), MPFR_RNDN);
    return {m1.to_double(), scaled.to_double()};
}

double expected_survivors(std::uint64_t n) {
    if (n < 2) return static_cast<double>(n);
    const double m = static_cast<double>(n - 1);
    return static_cast<double>(n) * std::exp(m * std::log1p(-1.0 / m));
}

double asymptotic_residual(double n, double a, double b, double c, unsigned precision_bits) {
    require(n > std::max(a, b), "asymptotic residual needs n > max(a, b)");
    const auto p = static_cast<mpfr_prec_t>(precision_bits);
    BigFloat base(n - a, p), denom(n - b, p), exponent(n - c, p), value(p);
    mpfr_div(base.get(), base.get(), denom.get(), MPFR_RNDN);
    mpfr_pow(value.get(), base.get(), exponent.get(), MPFR_RNDN);
    BigFloat expansion(b - a, p), correction(p);
    mpfr_exp(expansion.get(), expansion.get(), MPFR_RNDN);
    // 1 - (a-b)(a+b-2c)/(2n)
    mpfr_set_d(correction.get(), (a - b) * (a + b - 2.0 * c), MPFR_RNDN);
    BigFloat two_n(2.0 * n, p);
    mpfr_div(correction.get(), correction.get(), two_n.get(), MPFR_RNDN);
    mpfr_ui_sub(correction.get(), 1, correction.get(), MPFR_RNDN);
    mpfr_mul(expansion.get(), expansion.get(), correction.get(), MPFR_RNDN);
    mpfr_sub(value.get(), value.get(), expansion.get(), MPFR_RNDN);
    return value.to_double();
}

}  // namespace roulette::exact
