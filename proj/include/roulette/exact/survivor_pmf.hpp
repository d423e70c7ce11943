#pragma once

// Exact distribution of the number of first-round survivors xi_n when each
// of n players shoots a uniformly random other player.

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "roulette/exact/mpfr_float.hpp"

namespace roulette::exact {

inline constexpr unsigned kDefaultExactCeiling = 600;
inline constexpr unsigned kDefaultCertifiedCeiling = 5000;
inline constexpr unsigned kBruteForceMax = 8;

/// P(xi_n = k) = weights[k] / denominator for k = 0..n-2, denominator = (n-1)^n.
/// No entry exists for k = n-1 or k = n: some player is always hit.
struct SurvivorPmf {
    unsigned n = 0;
    std::vector<mpz_class> weights;
    mpz_class denominator;

    mpq_class probability(std::size_t k) const;
    /// E[xi (xi-1) ... (xi-r+1)].
    mpq_class factorial_moment(unsigned r) const;
    mpq_class mean() const;
    mpq_class variance() const;

    friend bool operator==(const SurvivorPmf& a, const SurvivorPmf& b) {
        return a.n == b.n && a.weights == b.weights && a.denominator == b.denominator;
    }
};

/// E(Y_{i1} ... Y_{il}) = ((n-l)/(n-1))^l ((n-l-1)/(n-1))^(n-l) for l distinct players.
mpq_class mixed_moment(unsigned n, unsigned l);

/// Waring's formula evaluated exactly. The alternating sum
///   w_k = sum_{l=k}^{n-2} (-1)^(l-k) C(l,k) T_l,  T_l = C(n,l) (n-l)^l (n-l-1)^(n-l)
/// is the coefficient list of sum_l T_l (x-1)^l, computed by a Horner-style
/// Taylor shift with integer additions only. Throws ResourceLimitError above
/// `exact_ceiling`.
SurvivorPmf survivor_pmf(unsigned n, unsigned exact_ceiling = kDefaultExactCeiling);

/// The same alternating sum evaluated term by term from a precomputed
/// binomial triangle, parallel over k. Kept as a second route to the weights.
SurvivorPmf survivor_pmf_direct(unsigned n, unsigned threads = 1,
                                unsigned exact_ceiling = kDefaultExactCeiling);

/// Enumerates all (n-1)^n target profiles; n in 2..8.
SurvivorPmf brute_force_pmf(unsigned n);

/// Waring weights computed in floating point at n + precision_bits bits, with
/// a per-entry absolute error bound on each probability.
struct CertifiedPmf {
    unsigned n = 0;
    std::vector<BigFloat> probability;
    std::vector<double> radius;
};

CertifiedPmf certified_pmf(unsigned n, unsigned precision_bits);
/// Rounds an exact pmf to `precision_bits`, recording the rounding radius.
CertifiedPmf round_pmf(const SurvivorPmf& pmf, unsigned precision_bits);

/// Moments of xi_n / n from their closed forms.
struct ExactMoments {
    mpq_class mean;      ///< ((n-2)/(n-1))^(n-1)
    mpq_class variance;  ///< (1/n) m1 + ((n-1)/n) m2 - m1^2
};

ExactMoments exact_moments(unsigned n);

/// Closed-form moments evaluated with MPFR at `precision_bits`.
struct FloatMoments {
    double mean;             ///< E(xi_n / n)
    double scaled_variance;  ///< n Var(xi_n / n)
};

FloatMoments certified_moments(std::uint64_t n, unsigned precision_bits = 256);

/// E(xi_n) = n ((n-2)/(n-1))^(n-1) in double precision.
double expected_survivors(std::uint64_t n);

/// ((n-a)/(n-b))^(n-c) - e^(b-a) (1 - (a-b)(a+b-2c)/(2n)), evaluated at
/// `precision_bits` and rounded to double. Requires n > max(a, b).
double asymptotic_residual(double n, double a, double b, double c, unsigned precision_bits = 256);

}  // namespace roulette::exact
