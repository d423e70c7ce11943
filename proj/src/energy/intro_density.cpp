#include "roulette/energy/intro_density.hpp"

#include "roulette/common.hpp"

namespace roulette::energy {

double intro_q(double x) noexcept {
    if (x >= -1.0 && x <= 0.0) return -kIntroC / 2.0;
    if (x > 0.0 && x <= kIntroC) return 0.5;
    return 0.0;
}

double intro_density(double x, double y) noexcept {
    if (x < -1.0 || x > 1.0 || y < -1.0 || y > 1.0) return 0.0;
    return 0.25 - intro_q(x) * intro_q(y);
}

double IntroSample::acceptance_rate() const noexcept {
    return proposals == 0 ? 0.0 : static_cast<double>(sample.size()) / static_cast<double>(proposals);
}

IntroSample sample_intro_density(std::size_t m, std::uint64_t seed) {
    require(m >= 1, "sample size must be positive");
    IntroSample out;
    out.sample.xs.reserve(m);
    out.sample.ys.reserve(m);
    rng::Stream stream(seed, 0, rng::Domain::intro_density);
    while (out.sample.size() < m) {
        const double x = 2.0 * stream.next_double() - 1.0;
        const double y = 2.0 * stream.next_double() - 1.0;
        const double u = stream.next_double() * kIntroEnvelope;
        ++out.proposals;
        if (u < intro_density(x, y)) {
            out.sample.xs.push_back(x);
            out.sample.ys.push_back(y);
        }
    }
    return out;
}

}  // namespace roulette::energy
