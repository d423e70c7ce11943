#include "roulette/sim/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "roulette/common.hpp"
#include "roulette/exact/survivor_pmf.hpp"
#include "roulette/kernels/kernels.hpp"
#include "roulette/parallel.hpp"

namespace roulette::sim {
namespace {

constexpr double kLimitVariance = 0.0972088746982535;  // 1/e - 2/e^2

std::uint32_t checked_alive(std::uint64_t n) {
    require(n <= 0xFFFFFFFFull, "n must fit in 32 bits");
    return static_cast<std::uint32_t>(n);
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
};

Moments sample_moments(std::vector<double>& values) {
    Moments m;
    const auto count = static_cast<double>(values.size());
    m.mean = pairwise_sum(values) / count;
    if (values.size() < 2) return m;
    for (double& v : values) v = (v - m.mean) * (v - m.mean);
    m.variance = pairwise_sum(values) / (count - 1.0);
    return m;
}

McEstimate estimate_from(std::vector<double> values, std::uint64_t seed) {
    McEstimate e;
    e.reps = values.size();
    e.seed = seed;
    const Moments m = sample_moments(values);
    e.point = m.mean;
    e.std_error = std::sqrt(m.variance / static_cast<double>(e.reps));
    return e;
}

// Coupled round without recording targets. Buffers hold at least `alive` bytes.
struct CoupledCounts {
    std::uint32_t survivors;
    std::uint32_t urn_survivors;
    std::uint32_t eta;
};

CoupledCounts coupled_round(std::uint32_t alive, rng::Stream& stream, std::uint8_t* game_hit,
                            std::uint8_t* urn_hit, std::uint32_t* targets) {
    std::memset(game_hit, 0, alive);
    std::memset(urn_hit, 0, alive);
    std::uint32_t eta = 0;
    for (std::uint32_t i = 0; i < alive; ++i) {
        const std::uint32_t urn = stream.bounded(alive);
        urn_hit[urn] = 1;
        std::uint32_t target = urn;
        if (urn == i) {
            ++eta;
            const std::uint32_t j = stream.bounded(alive - 1);
            target = j < i ? j : j + 1;
        }
        game_hit[target] = 1;
        if (targets != nullptr) targets[i] = target > i ? target - i : target + alive - i;
    }
    CoupledCounts c{};
    c.survivors = static_cast<std::uint32_t>(kernels::count_zero_bytes({game_hit, alive}));
    c.urn_survivors = static_cast<std::uint32_t>(kernels::count_zero_bytes({urn_hit, alive}));
    c.eta = eta;
    const std::uint32_t gap = c.survivors > c.urn_survivors ? c.survivors - c.urn_survivors
                                                             : c.urn_survivors - c.survivors;
    if (gap > eta) throw InvariantViolation("coupling violated: |xi - xi'| > eta");
    return c;
}

}  // namespace

RoundSample simulate_round(std::uint32_t alive, rng::Stream& stream) {
    require(alive >= 2, "a round needs at least two players");
    RoundSample s;
    s.alive_before = alive;
    s.targets.resize(alive);
    std::vector<std::uint8_t> game_hit(alive), urn_hit(alive);
    const CoupledCounts c = coupled_round(alive, stream, game_hit.data(), urn_hit.data(), s.targets.data());
    s.survivors = c.survivors;
    s.urn_survivors = c.urn_survivors;
    s.eta = c.eta;
    return s;
}

std::uint32_t round_survivors(std::uint32_t alive, rng::Stream& stream, std::span<std::uint8_t> hit) {
    require(alive >= 2, "a round needs at least two players");
    require(hit.size() >= alive, "hit buffer too small");
    std::uint8_t* flags = hit.data();
    std::memset(flags, 0, alive);
    for (std::uint32_t i = 0; i < alive; ++i) {
        const std::uint32_t j = stream.bounded(alive - 1);
        flags[j < i ? j : j + 1] = 1;
    }
    return static_cast<std::uint32_t>(kernels::count_zero_bytes({flags, alive}));
}

bool simulate_game(std::uint64_t n, rng::Stream& stream, std::vector<std::uint8_t>& scratch) {
    std::uint32_t alive = checked_alive(n);
    if (scratch.size() < alive) scratch.resize(alive);
    while (alive >= 2) alive = round_survivors(alive, stream, scratch);
    return alive == 1;
}

bool simulate_game(std::uint64_t n, rng::Stream& stream) {
    std::vector<std::uint8_t> scratch;
    return simulate_game(n, stream, scratch);
}

McEstimate estimate_p(std::uint64_t n, std::uint64_t reps, std::uint64_t seed, unsigned threads) {
    require(reps >= 1, "reps must be positive");
    checked_alive(n);
    std::vector<std::uint8_t> wins(reps);
    parallel_chunks(reps, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint8_t> scratch(static_cast<std::size_t>(n));
        for (std::size_t r = begin; r < end; ++r) {
            rng::Stream stream(seed, r, rng::Domain::game);
            wins[r] = simulate_game(n, stream, scratch) ? 1 : 0;
        }
    });
    std::uint64_t total = 0;
    for (auto w : wins) total += w;
    McEstimate e;
    e.reps = reps;
    e.seed = seed;
    e.point = static_cast<double>(total) / static_cast<double>(reps);
    e.std_error = std::sqrt(e.point * (1.0 - e.point) / static_cast<double>(reps));
    return e;
}

namespace {

// One round from n players per rep, drawn from the given domain.
std::vector<std::uint32_t> first_round_survivors(std::uint64_t n, std::uint64_t reps, std::uint64_t seed,
                                                 unsigned threads, rng::Domain domain) {
    const std::uint32_t alive = checked_alive(n);
    std::vector<std::uint32_t> out(reps);
    parallel_chunks(reps, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint8_t> hit(alive);
        for (std::size_t r = begin; r < end; ++r) {
            rng::Stream stream(seed, r, domain);
            out[r] = round_survivors(alive, stream, hit);
        }
    });
    return out;
}

}  // namespace

CltResult clt_check(std::uint64_t n, std::uint64_t reps, std::uint64_t seed, unsigned threads,
                    CenteringPolicy policy) {
    require(n >= 10, "clt_check needs n >= 10");
    require(reps >= 2, "clt_check needs at least two reps");
    const auto xi = first_round_survivors(n, reps, seed, threads, rng::Domain::clt);
    CltResult res;
    res.n = n;
    res.reps = reps;
    const double nd = static_cast<double>(n);
    res.centre = policy == CenteringPolicy::exact_mean ? exact::expected_survivors(n) : nd * std::exp(-1.0);
    res.target_variance = nd * kLimitVariance;
    const double scale = std::sqrt(res.target_variance);
    std::vector<double> z(reps);
    for (std::size_t r = 0; r < reps; ++r) z[r] = (static_cast<double>(xi[r]) - res.centre) / scale;
    const Moments m = sample_moments(z);
    res.standardized_mean = m.mean;
    res.variance_ratio = m.variance;
    return res;
}

bool TailTable::any_flagged() const {
    return std::any_of(rows.begin(), rows.end(), [](const TailRow& r) { return r.flagged; });
}

TailTable mcdiarmid_check(std::uint64_t n, std::uint64_t reps, std::span<const double> epsilons,
                          std::uint64_t seed, unsigned threads) {
    require(n >= 2, "mcdiarmid_check needs n >= 2");
    require(reps >= 1, "reps must be positive");
    for (double eps : epsilons) require(std::isfinite(eps) && eps >= 0.0, "epsilon must be finite and >= 0");
    const auto xi = first_round_survivors(n, reps, seed, threads, rng::Domain::mcdiarmid);
    TailTable t;
    t.n = n;
    t.reps = reps;
    t.seed = seed;
    t.mean = exact::expected_survivors(n);
    const double nd = static_cast<double>(n);
    const double rd = static_cast<double>(reps);
    for (double eps : epsilons) {
        std::uint64_t hits = 0;
        for (auto x : xi) hits += std::abs(static_cast<double>(x) - t.mean) >= eps ? 1 : 0;
        TailRow row;
        row.epsilon = eps;
        row.empirical = static_cast<double>(hits) / rd;
        row.bound = 2.0 * std::exp(-2.0 * eps * eps / nd);
        const double b = std::min(row.bound, 1.0);
        row.binomial_stderr = std::sqrt(b * (1.0 - b) / rd);
        row.flagged = row.empirical > row.bound + 4.0 * row.binomial_stderr;
        t.rows.push_back(row);
    }
    return t;
}

namespace {

std::vector<CoupledCounts> coupled_rounds(std::uint64_t n, std::uint64_t reps, std::uint64_t seed,
                                          unsigned threads) {
    require(n >= 2, "coupling needs n >= 2");
    require(reps >= 2, "coupling needs at least two reps");
    const std::uint32_t alive = checked_alive(n);
    std::vector<CoupledCounts> out(reps);
    parallel_chunks(reps, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint8_t> game_hit(alive), urn_hit(alive);
        for (std::size_t r = begin; r < end; ++r) {
            rng::Stream stream(seed, r, rng::Domain::coupling);
            out[r] = coupled_round(alive, stream, game_hit.data(), urn_hit.data(), nullptr);
        }
    });
    return out;
}

}  // namespace

McEstimate eta_mean(std::uint64_t n, std::uint64_t reps, std::uint64_t seed, unsigned threads) {
    const auto rounds = coupled_rounds(n, reps, seed, threads);
    std::vector<double> eta(reps);
    for (std::size_t r = 0; r < reps; ++r) eta[r] = rounds[r].eta;
    return estimate_from(std::move(eta), seed);
}

CouplingReport coupling_check(std::uint64_t n, std::uint64_t reps, std::uint64_t seed, unsigned threads) {
    const auto rounds = coupled_rounds(n, reps, seed, threads);
    CouplingReport rep;
    rep.n = n;
    rep.rounds = reps;
    std::vector<double> eta(reps), urn(reps), game(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto& c = rounds[r];
        const std::uint32_t gap = c.survivors > c.urn_survivors ? c.survivors - c.urn_survivors
                                                                 : c.urn_survivors - c.survivors;
        rep.max_gap = std::max(rep.max_gap, gap);
        if (gap > c.eta) ++rep.violations;
        eta[r] = c.eta;
        urn[r] = c.urn_survivors;
        game[r] = c.survivors;
    }
    rep.eta = estimate_from(std::move(eta), seed);
    rep.urn_survivors = estimate_from(std::move(urn), seed);
    rep.survivors = estimate_from(std::move(game), seed);
    const double nd = static_cast<double>(n);
    rep.urn_survivors_exact = nd * std::pow(1.0 - 1.0 / nd, nd);
    return rep;
}

}  // namespace roulette::sim
