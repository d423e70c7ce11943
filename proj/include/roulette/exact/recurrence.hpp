#pragma once

// p_n: probability that the game started with n players ends with exactly
// one survivor. p_0 = 0, p_1 = 1, p_2 = 0 and, for n >= 3,
//   p_n = sum_{k=0}^{n-2} p_k P(xi_n = k).

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roulette/exact/survivor_pmf.hpp"

namespace roulette::exact {

enum class Provenance { exact, certified, monte_carlo };

const char* provenance_name(Provenance p) noexcept;
Provenance parse_provenance(const std::string& name);

struct PEntry {
    std::uint64_t n = 0;
    Provenance provenance = Provenance::exact;
    std::optional<mpq_class> exact;  ///< set iff provenance == exact
    double value = 0.0;              ///< nearest double (exact), centre (certified) or MC point
    double err_radius = 0.0;         ///< 0 (exact), certified bound on |p_n - value|, or MC stderr
    std::uint64_t reps = 0;          ///< MC repetitions, 0 otherwise
};

struct PSeries {
    std::vector<PEntry> entries;
    /// True when some certified radius exceeded the configured threshold.
    bool flagged = false;
    std::vector<std::string> warnings;
};

/// Mass of the survivor distribution outside [k_lo, k_hi].
struct TruncationCertificate {
    unsigned n = 0;
    unsigned k_lo = 0;
    unsigned k_hi = 0;
    double mcdiarmid_bound = 0.0;  ///< 2 exp(-2 eps^2 / n), eps = distance from E(xi_n) to the nearer edge
    double tail_bound = 0.0;       ///< min(mcdiarmid_bound, exact tail sum + its error) when available
};

/// Window k in n/e -+ ceil(width * sqrt(n ln n)), clipped to {0..n-2}.
struct WindowPolicy {
    bool enabled = true;
    double width = 3.0;
};

TruncationCertificate truncation_window(unsigned n, const WindowPolicy& policy);
/// McDiarmid bound on P(xi_n outside [k_lo, k_hi]).
double mcdiarmid_outside_bound(unsigned n, unsigned k_lo, unsigned k_hi);

enum class RecurrenceMode { exact, certified };

struct RecurrenceOptions {
    RecurrenceMode mode = RecurrenceMode::exact;
    unsigned precision_bits = 128;
    unsigned exact_ceiling = kDefaultExactCeiling;
    unsigned certified_ceiling = kDefaultCertifiedCeiling;
    WindowPolicy window{};
    double radius_threshold = 1e-12;
    unsigned threads = 1;
};

struct RecurrenceRun {
    PSeries series;
    /// One per n >= 3 in certified mode; empty in exact mode.
    std::vector<TruncationCertificate> certificates;
};

/// Entries n = 0..max_n. Certified mode rounds exact pmfs for n up to
/// exact_ceiling and uses certified_pmf above it; the radius of p_n adds the
/// window tail bound, the propagated radii of p_k and P(xi_n = k), and the
/// rounding of the sum.
RecurrenceRun run_recurrence(unsigned max_n, const RecurrenceOptions& options = {});

inline PSeries p_recurrence(unsigned max_n, const RecurrenceOptions& options = {}) {
    return run_recurrence(max_n, options).series;
}

}  // namespace roulette::exact
