#pragma once

// JSON mappings for the report structs, found by nlohmann::json through ADL,
// and the remaining CSV formats: wave plot data, grid functions and paired
// samples.

#include <string>
#include <string_view>

#include "json.hpp"
#include "roulette/analytic/charfn.hpp"
#include "roulette/analytic/functional_equation.hpp"
#include "roulette/energy/dcov.hpp"
#include "roulette/sim/game.hpp"
#include "roulette/waves/analyzer.hpp"

namespace roulette::sim {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(McEstimate, point, std_error, reps, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CltResult, n, reps, centre, target_variance, standardized_mean, variance_ratio)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TailRow, epsilon, empirical, bound, binomial_stderr, flagged)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TailTable, n, reps, seed, mean, rows)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CouplingReport, n, rounds, violations, max_gap, eta, urn_survivors,
                                   urn_survivors_exact, survivors)
}  // namespace roulette::sim

namespace roulette::waves {
NLOHMANN_JSON_SERIALIZE_ENUM(ExtremumKind, {{ExtremumKind::peak, "peak"}, {ExtremumKind::trough, "trough"}})
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Extremum, position, amplitude, amplitude_error, position_spread, amplitude_spread,
                                   kind)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WavePoint, log_n, p, err, smoothed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WaveModel, c, extrema, period_estimates, kappa_prime, window, bootstrap_replicas,
                                   bootstrap_failures, points)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DecayFit, kappa_prime, clipped, product_limit, ratios_used)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SubseqPoint, n, p, err)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SubseqProbe, phi, tolerance, points, dispersion, unweighted_dispersion,
                                   full_dispersion, tail_dispersion)
}  // namespace roulette::waves

namespace roulette::energy {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DcorResult, value, clipped, dcov2_xy, dcov2_xx, dcov2_yy)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PermutationResult, statistic, p_value, permutations, at_least)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CovEstimate, value, bootstrap_stderr, replicas)
}  // namespace roulette::energy

namespace roulette::analytic {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FeqSides, lhs, rhs)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConstancyProbe, lhs_spread, rhs_spread, points)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PolyaViolation, property, t, value, count)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PolyaReport, y, origin, even, nonincreasing, convex, vanishing, violations)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CauchyIdentity, w, integral, exact, error, error_bound)
}  // namespace roulette::analytic

namespace roulette::io {

inline constexpr std::string_view kWavePlotSchema = "roulette waveplot csv v1";
inline constexpr std::string_view kGridSchema = "roulette grid csv v1";
inline constexpr std::string_view kPairedSchema = "roulette paired csv v1";

/// log_n,p,err,smoothed,c
std::string wave_plot_csv(const waves::WaveModel& model);

/// x,re,im with the three error-bound components in comment lines.
std::string grid_function_csv(const analytic::GridFunction& g);

/// x,y
std::string paired_csv(const energy::PairedSample& s);
energy::PairedSample parse_paired_csv(std::string_view text);

/// Parses JSON text, reporting syntax errors as ValidationError.
nlohmann::json parse_json(std::string_view text);

}  // namespace roulette::io
