#include "roulette/exact/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roulette/common.hpp"

namespace roulette::exact {

namespace {

/// Nudges a non-negative error estimate upward to absorb the double-precision
/// rounding of the bookkeeping itself.
double round_up(double x) { return std::nextafter(x * (1.0 + 0x1.0p-50), INFINITY); }

PEntry exact_entry(std::uint64_t n, const mpq_class& value) {
    PEntry e;
    e.n = n;
    e.provenance = Provenance::exact;
    e.exact = value;
    e.value = BigFloat(value, 53).to_double();  // mpq get_d truncates
    return e;
}

RecurrenceRun exact_run(unsigned max_n, const RecurrenceOptions& options) {
    if (max_n > options.exact_ceiling) {
        throw ResourceLimitError("exact recurrence requested to n = " + std::to_string(max_n) +
                                 " above the exact-mode ceiling " + std::to_string(options.exact_ceiling));
    }
    RecurrenceRun run;
    auto& entries = run.series.entries;
    const mpq_class seeds[3] = {0, 1, 0};
    for (unsigned n = 0; n <= std::min(max_n, 2u); ++n) entries.push_back(exact_entry(n, seeds[n]));

    // Every p_k is kept as numerators[k] / denominator over one shared
    // denominator, the product of (j-1)^j for j = 3..n.
    std::vector<mpz_class> numerators = {0, 1, 0};
    mpz_class denominator = 1;
    mpz_class sum, term;
    for (unsigned n = 3; n <= max_n; ++n) {
        const SurvivorPmf pmf = survivor_pmf(n, options.exact_ceiling);
        sum = 0;
        for (std::size_t k = 0; k < pmf.weights.size(); ++k) {
            if (numerators[k] == 0) continue;
            mpz_mul(term.get_mpz_t(), numerators[k].get_mpz_t(), pmf.weights[k].get_mpz_t());
            sum += term;
        }
        for (auto& a : numerators) a *= pmf.denominator;
        denominator *= pmf.denominator;
        numerators.push_back(sum);
        mpq_class p(sum, denominator);
        p.canonicalize();
        entries.push_back(exact_entry(n, p));
    }
    return run;
}

RecurrenceRun certified_run(unsigned max_n, const RecurrenceOptions& options) {
    require(options.precision_bits >= 64, "precision_bits must be at least 64");
    if (max_n > options.certified_ceiling) {
        throw ResourceLimitError("certified recurrence requested to n = " + std::to_string(max_n) +
                                 " above the certified-mode ceiling " +
                                 std::to_string(options.certified_ceiling));
    }
    const auto prec = static_cast<mpfr_prec_t>(options.precision_bits);
    const double u = unit_roundoff(prec);

    RecurrenceRun run;
    auto& series = run.series;
    const mpq_class seeds[3] = {0, 1, 0};
    std::vector<BigFloat> value;
    std::vector<double> radius;
    for (unsigned n = 0; n <= std::min(max_n, 2u); ++n) {
        series.entries.push_back(exact_entry(n, seeds[n]));
        value.emplace_back(seeds[n], prec);
        radius.push_back(0.0);
    }

    BigFloat sum(prec), term(prec), diff(prec);
    for (unsigned n = 3; n <= max_n; ++n) {
        const CertifiedPmf pmf = n <= options.exact_ceiling
                                     ? round_pmf(survivor_pmf(n, options.exact_ceiling), options.precision_bits)
                                     : certified_pmf(n, options.precision_bits);
        TruncationCertificate cert = truncation_window(n, options.window);

        double outside = 0.0;
        for (std::size_t k = 0; k < pmf.probability.size(); ++k) {
            if (k >= cert.k_lo && k <= cert.k_hi) continue;
            outside += std::max(pmf.probability[k].to_double(MPFR_RNDU), 0.0) + pmf.radius[k];
        }
        cert.tail_bound = std::min(cert.mcdiarmid_bound, round_up(outside));

        mpfr_set_zero(sum.get(), 1);
        double propagated = 0.0;
        double magnitude = 0.0;
        for (unsigned k = cert.k_lo; k <= cert.k_hi; ++k) {
            if (radius[k] == 0.0 && mpfr_zero_p(value[k].get())) continue;
            mpfr_mul(term.get(), value[k].get(), pmf.probability[k].get(), MPFR_RNDN);
            mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
            const double pk = std::fabs(value[k].to_double(MPFR_RNDA));
            const double qk = std::fabs(pmf.probability[k].to_double(MPFR_RNDA));
            propagated += radius[k] * qk + pk * pmf.radius[k] + radius[k] * pmf.radius[k];
            magnitude += pk * qk;
        }
        const double window_size = static_cast<double>(cert.k_hi - cert.k_lo + 1);
        double r = cert.tail_bound + propagated + (2.0 * window_size + 2.0) * u * magnitude;
        r = round_up(r);

        PEntry e;
        e.n = n;
        e.provenance = Provenance::certified;
        e.value = sum.to_double();
        BigFloat nearest(e.value, prec);
        mpfr_sub(diff.get(), sum.get(), nearest.get(), MPFR_RNDN);
        e.err_radius = round_up(r + std::fabs(diff.to_double(MPFR_RNDA)));
        if (e.err_radius > options.radius_threshold && !series.flagged) {
            series.flagged = true;
            series.warnings.push_back("certified radius " + std::to_string(e.err_radius) + " at n = " +
                                      std::to_string(n) + " exceeds threshold " +
                                      std::to_string(options.radius_threshold));
        }
        series.entries.push_back(std::move(e));
        value.push_back(sum);
        radius.push_back(r);
        run.certificates.push_back(cert);
    }
    return run;
}

}  // namespace

const char* provenance_name(Provenance p) noexcept {
    switch (p) {
        case Provenance::exact: return "exact";
        case Provenance::certified: return "certified";
        case Provenance::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

Provenance parse_provenance(const std::string& name) {
    if (name == "exact") return Provenance::exact;
    if (name == "certified") return Provenance::certified;
    if (name == "monte_carlo") return Provenance::monte_carlo;
    throw ValidationError("unknown provenance '" + name + "'");
}

double mcdiarmid_outside_bound(unsigned n, unsigned k_lo, unsigned k_hi) {
    const double mean = expected_survivors(n);
    const bool below = k_lo > 0;
    const bool above = n >= 2 && k_hi < n - 2;
    if (!below && !above) return 0.0;
    double eps = INFINITY;
    if (below) eps = std::min(eps, mean - (static_cast<double>(k_lo) - 1.0));
    if (above) eps = std::min(eps, static_cast<double>(k_hi) + 1.0 - mean);
    if (eps <= 0.0) return 1.0;
    return std::min(1.0, round_up(2.0 * std::exp(-2.0 * eps * eps / static_cast<double>(n))));
}

TruncationCertificate truncation_window(unsigned n, const WindowPolicy& policy) {
    require(n >= 2, "truncation window needs n >= 2");
    TruncationCertificate cert;
    cert.n = n;
    const unsigned top = n - 2;
    if (!policy.enabled) {
        cert.k_lo = 0;
        cert.k_hi = top;
        return cert;
    }
    const double centre = static_cast<double>(n) / std::numbers::e;
    const double half = std::ceil(policy.width * std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n))));
    cert.k_lo = static_cast<unsigned>(std::max(0.0, std::ceil(centre - half)));
    cert.k_hi = static_cast<unsigned>(std::min<double>(top, std::floor(centre + half)));
    cert.mcdiarmid_bound = mcdiarmid_outside_bound(n, cert.k_lo, cert.k_hi);
    cert.tail_bound = cert.mcdiarmid_bound;
    return cert;
}

RecurrenceRun run_recurrence(unsigned max_n, const RecurrenceOptions& options) {
    return options.mode == RecurrenceMode::exact ? exact_run(max_n, options) : certified_run(max_n, options);
}

}  // namespace roulette::exact
