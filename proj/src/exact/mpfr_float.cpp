#include "roulette/exact/mpfr_float.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace roulette::exact {

namespace {

mpfr_prec_t max_prec(const BigFloat& a, const BigFloat& b) { return std::max(a.precision(), b.precision()); }

}  // namespace

std::string BigFloat::to_string(int digits) const {
    if (mpfr_zero_p(value_)) return "0";
    char* raw = nullptr;
    mpfr_asprintf(&raw, "%.*Rg", digits, value_);
    std::unique_ptr<char, decltype(&mpfr_free_str)> guard(raw, &mpfr_free_str);
    return std::string(raw);
}

mpq_class BigFloat::to_rational() const {
    mpz_class mantissa;
    const mpfr_exp_t exponent = mpfr_get_z_2exp(mantissa.get_mpz_t(), value_);
    mpq_class q(mantissa);
    if (exponent >= 0) {
        mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exponent));
    } else {
        mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-exponent));
    }
    return q;
}

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
    BigFloat r(max_prec(a, b));
    mpfr_add(r.value_, a.value_, b.value_, MPFR_RNDN);
    return r;
}

BigFloat operator-(const BigFloat& a, const BigFloat& b) {
    BigFloat r(max_prec(a, b));
    mpfr_sub(r.value_, a.value_, b.value_, MPFR_RNDN);
    return r;
}

BigFloat operator*(const BigFloat& a, const BigFloat& b) {
    BigFloat r(max_prec(a, b));
    mpfr_mul(r.value_, a.value_, b.value_, MPFR_RNDN);
    return r;
}

BigFloat operator/(const BigFloat& a, const BigFloat& b) {
    BigFloat r(max_prec(a, b));
    mpfr_div(r.value_, a.value_, b.value_, MPFR_RNDN);
    return r;
}

BigFloat exp(const BigFloat& x) {
    BigFloat r(x.precision());
    mpfr_exp(r.get(), x.get(), MPFR_RNDN);
    return r;
}

BigFloat log(const BigFloat& x) {
    BigFloat r(x.precision());
    mpfr_log(r.get(), x.get(), MPFR_RNDN);
    return r;
}

BigFloat pow(const BigFloat& base, unsigned long exponent) {
    BigFloat r(base.precision());
    mpfr_pow_ui(r.get(), base.get(), exponent, MPFR_RNDN);
    return r;
}

BigFloat abs(const BigFloat& x) {
    BigFloat r(x.precision());
    mpfr_abs(r.get(), x.get(), MPFR_RNDN);
    return r;
}

BigFloat constant_e(mpfr_prec_t precision) {
    BigFloat one(1.0, precision);
    return exp(one);
}

double unit_roundoff(mpfr_prec_t precision) noexcept {
    // 2^-(p-1) covers one correctly rounded operation with margin.
    return std::ldexp(1.0, -static_cast<int>(precision) + 1);
}

}  // namespace roulette::exact
