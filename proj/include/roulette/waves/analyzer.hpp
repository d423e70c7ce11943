#pragma once

// Oscillation of p_n against x = ln n: centre level, extrema, peak spacing,
// the decay heuristic h(M+1) ~ h(M)(1 - kappa' e^{-M}), and fixed-phase
// subsequences. Everything reported is an estimate; nothing here decides
// whether p_n converges.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "roulette/exact/recurrence.hpp"
#include "roulette/sim/game.hpp"

namespace roulette::waves {

/// Thrown when the series shows fewer than two peaks.
class InsufficientOscillation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by fit_wave_decay when successive amplitudes change sign.
class ModelViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SeriesOptions {
    exact::RecurrenceOptions recurrence{};
    unsigned threads = 1;
};

/// Recurrence values for n = 0..exact_to (none when exact_to = 0) followed by
/// one Monte Carlo estimate per grid point. Grid points must be strictly
/// increasing and above exact_to. Each grid point n uses its own seed
/// derived from (seed, n), so estimates at different n are independent.
exact::PSeries build_series(unsigned exact_to, const std::vector<std::uint64_t>& mc_grid, std::uint64_t reps,
                            std::uint64_t seed = sim::kDefaultSeed, const SeriesOptions& options = {});

std::uint64_t grid_point_seed(std::uint64_t seed, std::uint64_t n) noexcept;

/// Round(n1 e^{-i / per_unit}) for i = 0.. while >= n0, deduplicated, ascending.
std::vector<std::uint64_t> log_grid(std::uint64_t n0, std::uint64_t n1, double per_unit);

enum class ExtremumKind { peak, trough };

const char* extremum_kind_name(ExtremumKind k) noexcept;

struct Extremum {
    double position = 0.0;          ///< M, in ln n
    double amplitude = 0.0;         ///< h = smoothed p - c at M
    double amplitude_error = 0.0;   ///< propagated from the entries' error radii
    double position_spread = 0.0;   ///< bootstrap standard deviation of M
    double amplitude_spread = 0.0;  ///< bootstrap standard deviation of h
    ExtremumKind kind = ExtremumKind::peak;
};

struct WavePoint {
    double log_n = 0.0;
    double p = 0.0;
    double err = 0.0;
    double smoothed = 0.0;
};

struct WaveModel {
    double c = 0.0;
    std::vector<Extremum> extrema;          ///< alternating, increasing position
    std::vector<double> period_estimates;   ///< successive peak gaps
    double kappa_prime = 0.0;
    double window = 0.0;                    ///< smoothing width in ln n
    unsigned bootstrap_replicas = 0;
    unsigned bootstrap_failures = 0;        ///< replicas whose extremum count differed
    std::vector<WavePoint> points;

    std::vector<Extremum> peaks() const;
    std::vector<Extremum> troughs() const;
};

struct WaveOptions {
    unsigned bootstrap_replicas = 64;
    std::uint64_t seed = sim::kDefaultSeed;
    unsigned threads = 1;
};

/// Uses entries with n >= 3. The smoothing window is period / window_divisor
/// in ln n, where the period comes from hysteresis crossings of the raw
/// series; the centred moving average is applied twice. c is the mean of the
/// smoothed curve between the first and last peak.
WaveModel detect_waves(const exact::PSeries& series, unsigned window_divisor = 8, const WaveOptions& options = {});

struct DecayFit {
    double kappa_prime = 0.0;
    bool clipped = false;         ///< least-squares estimate was negative
    double product_limit = 0.0;   ///< prod_{i>=0} (1 - kappa' e^{-M_0 - i}), 0 when some factor <= 0
    unsigned ratios_used = 0;
};

/// Least squares through the origin of 1 - h_{i+1}/h_i on e^{-M_i} over the
/// peaks, or over the troughs when there are fewer than three peaks.
DecayFit fit_wave_decay(const WaveModel& model);

/// Product for given kappa' and first position; exposed for testing.
double decay_product(double kappa_prime, double m0);

struct SubseqPoint {
    std::uint64_t n = 0;
    double p = 0.0;
    double err = 0.0;
};

struct SubseqProbe {
    double phi = 0.0;
    double tolerance = 0.0;
    std::vector<SubseqPoint> points;
    double dispersion = 0.0;             ///< weighted sd of selected p, weights 1/(err^2 + floor^2)
    double unweighted_dispersion = 0.0;
    double full_dispersion = 0.0;        ///< sd of every entry with n in the selected range
    /// Weighted sd of the selected points with n >= n_min e^j, for j = 0, 1, ...
    /// while at least three points remain.
    std::vector<double> tail_dispersion;
};

inline constexpr double kDispersionWeightFloor = 1e-6;

/// Entries with n >= 1 whose frac(ln n) is within `tolerance` of phi on the circle.
/// The series must span three decades of n.
SubseqProbe subsequence_probe(const exact::PSeries& series, double phi, double tolerance);

}  // namespace roulette::waves
