#pragma once

// Density on [-1, 1]^2 with uniform marginals whose coordinates are
// dependent although cov(|X - X'|, |Y - Y'|) = 0:
//   p(x, y) = 1/4 - q(x) q(y),
//   q = -c/2 on [-1, 0], 1/2 on (0, c], 0 elsewhere, c = sqrt(2) - 1.

#include <cstdint>
#include <numbers>

#include "roulette/energy/dcov.hpp"

namespace roulette::energy {

inline constexpr double kIntroC = std::numbers::sqrt2 - 1.0;
/// max p, attained where one of q(x), q(y) is -c/2 and the other 1/2.
inline constexpr double kIntroEnvelope = 0.25 + kIntroC / 4.0;

double intro_q(double x) noexcept;
double intro_density(double x, double y) noexcept;

struct IntroSample {
    PairedSample sample;
    std::uint64_t proposals = 0;
    double acceptance_rate() const noexcept;
};

/// Rejection sampling from the uniform proposal on [-1, 1]^2 with envelope
/// kIntroEnvelope; expected acceptance 1 / (1 + c).
IntroSample sample_intro_density(std::size_t m, std::uint64_t seed = sim::kDefaultSeed);

}  // namespace roulette::energy
