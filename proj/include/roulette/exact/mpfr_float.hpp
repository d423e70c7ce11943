#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

namespace roulette::exact {

/// Owning MPFR value with value semantics. Arithmetic helpers round to
/// nearest unless a rounding mode is passed explicitly.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t precision = 128) { mpfr_init2(value_, precision); mpfr_set_zero(value_, 1); }
    BigFloat(double v, mpfr_prec_t precision) : BigFloat(precision) { mpfr_set_d(value_, v, MPFR_RNDN); }
    BigFloat(const mpz_class& v, mpfr_prec_t precision, mpfr_rnd_t rnd = MPFR_RNDN) : BigFloat(precision) {
        mpfr_set_z(value_, v.get_mpz_t(), rnd);
    }
    BigFloat(const mpq_class& v, mpfr_prec_t precision, mpfr_rnd_t rnd = MPFR_RNDN) : BigFloat(precision) {
        mpfr_set_q(value_, v.get_mpq_t(), rnd);
    }
    BigFloat(const BigFloat& other) : BigFloat(mpfr_get_prec(other.value_)) { mpfr_set(value_, other.value_, MPFR_RNDN); }
    BigFloat(BigFloat&& other) noexcept : BigFloat(2) { mpfr_swap(value_, other.value_); }
    BigFloat& operator=(const BigFloat& other) {
        if (this != &other) {
            mpfr_set_prec(value_, mpfr_get_prec(other.value_));
            mpfr_set(value_, other.value_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& other) noexcept {
        mpfr_swap(value_, other.value_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(value_); }

    mpfr_ptr get() noexcept { return value_; }
    mpfr_srcptr get() const noexcept { return value_; }
    mpfr_prec_t precision() const noexcept { return mpfr_get_prec(value_); }

    double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(value_, rnd); }
    /// Decimal rendering with `digits` significant digits.
    std::string to_string(int digits = 17) const;
    /// Exact rational value of the stored binary float.
    mpq_class to_rational() const;

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b);

private:
    mpfr_t value_;
};

BigFloat exp(const BigFloat& x);
BigFloat log(const BigFloat& x);
BigFloat pow(const BigFloat& base, unsigned long exponent);
BigFloat abs(const BigFloat& x);
BigFloat constant_e(mpfr_prec_t precision);

/// Upper bound on the unit roundoff at `precision` bits, as a double.
double unit_roundoff(mpfr_prec_t precision) noexcept;

}  // namespace roulette::exact
