#pragma once

// Monte Carlo for the roulette game. Repetition r always draws from
// rng::Stream(seed, r, <domain>), so every estimate is a function of
// (n, reps, seed) alone, whatever the thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "roulette/rng/philox.hpp"

namespace roulette::sim {

inline constexpr std::uint64_t kDefaultSeed = 20240416;

/// One round among `alive_before` players, with the coupled urn variant.
/// targets[i] = X_i in {1..alive_before-1}: the target sits X_i places to the
/// right of player i. Player i first draws an urn target uniformly from all
/// players; a self-target counts towards eta and is redirected uniformly to
/// one of the others, which yields the game's target.
struct RoundSample {
    std::uint32_t alive_before = 0;
    std::vector<std::uint32_t> targets;
    std::uint32_t survivors = 0;       ///< xi: players nobody targeted
    std::uint32_t urn_survivors = 0;   ///< xi': empty urns when self-targets are allowed
    std::uint32_t eta = 0;             ///< self-targets in the urn variant
};

struct McEstimate {
    double point = 0.0;
    double std_error = 0.0;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
};

/// Throws InvariantViolation if |xi - xi'| > eta.
RoundSample simulate_round(std::uint32_t alive, rng::Stream& stream);

/// Survivor count of one round; `hit` must hold at least `alive` bytes.
std::uint32_t round_survivors(std::uint32_t alive, rng::Stream& stream, std::span<std::uint8_t> hit);

/// Plays rounds until at most one player is left; true iff exactly one.
bool simulate_game(std::uint64_t n, rng::Stream& stream);
bool simulate_game(std::uint64_t n, rng::Stream& stream, std::vector<std::uint8_t>& scratch);

/// Fraction of reps games ending with one survivor; std_error = sqrt(p(1-p)/reps).
McEstimate estimate_p(std::uint64_t n, std::uint64_t reps, std::uint64_t seed = kDefaultSeed, unsigned threads = 1);

enum class CenteringPolicy { exact_mean, limit_mean };

struct CltResult {
    std::uint64_t n = 0;
    std::uint64_t reps = 0;
    double centre = 0.0;            ///< value subtracted from xi_n
    double target_variance = 0.0;   ///< n (1/e - 2/e^2)
    double standardized_mean = 0.0; ///< sample mean of (xi - centre) / sqrt(target_variance)
    double variance_ratio = 0.0;    ///< sample variance of the same, target 1
};

/// Requires n >= 10.
CltResult clt_check(std::uint64_t n, std::uint64_t reps, std::uint64_t seed = kDefaultSeed, unsigned threads = 1,
                    CenteringPolicy policy = CenteringPolicy::exact_mean);

struct TailRow {
    double epsilon = 0.0;
    double empirical = 0.0;        ///< frequency of |xi - E xi| >= epsilon
    double bound = 0.0;            ///< 2 exp(-2 epsilon^2 / n), not capped
    double binomial_stderr = 0.0;  ///< sqrt(b (1-b) / reps), b = min(bound, 1)
    bool flagged = false;          ///< empirical > bound + 4 binomial_stderr
};

struct TailTable {
    std::uint64_t n = 0;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;
    std::vector<TailRow> rows;
    bool any_flagged() const;
};

TailTable mcdiarmid_check(std::uint64_t n, std::uint64_t reps, std::span<const double> epsilons,
                          std::uint64_t seed = kDefaultSeed, unsigned threads = 1);

/// Mean number of self-targets in the urn variant.
McEstimate eta_mean(std::uint64_t n, std::uint64_t reps, std::uint64_t seed = kDefaultSeed, unsigned threads = 1);

struct CouplingReport {
    std::uint64_t n = 0;
    std::uint64_t rounds = 0;
    std::uint64_t violations = 0;     ///< rounds with |xi - xi'| > eta
    std::uint32_t max_gap = 0;        ///< largest |xi - xi'| seen
    McEstimate eta;
    McEstimate urn_survivors;
    double urn_survivors_exact = 0.0; ///< n (1 - 1/n)^n
    McEstimate survivors;
};

CouplingReport coupling_check(std::uint64_t n, std::uint64_t reps, std::uint64_t seed = kDefaultSeed,
                              unsigned threads = 1);

}  // namespace roulette::sim
