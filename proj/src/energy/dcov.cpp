#include "roulette/energy/dcov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "roulette/common.hpp"
#include "roulette/kernels/kernels.hpp"
#include "roulette/parallel.hpp"

namespace roulette::energy {

namespace {

constexpr std::size_t kBlockRows = 32;

std::size_t block_count(std::size_t m) { return (m + kBlockRows - 1) / kBlockRows; }

// Per-coordinate centring data: row means of |v_i - v_j| and their grand mean.
struct Centring {
    std::vector<double> row_mean;
    std::vector<double> shift;
    double grand = 0.0;

    kernels::CenteredView view(std::span<const double> v) const { return {v, shift, row_mean}; }
};

Centring centring(std::span<const double> v, unsigned threads) {
    const std::size_t m = v.size();
    Centring c;
    c.row_mean.resize(m);
    const std::size_t blocks = block_count(m);
    parallel_chunks(blocks, threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t lo = b * kBlockRows, hi = std::min(m, lo + kBlockRows);
            kernels::abs_diff_row_sums(v, lo, hi, std::span<double>(c.row_mean).subspan(lo, hi - lo));
        }
    });
    const double md = static_cast<double>(m);
    for (double& r : c.row_mean) r /= md;
    c.grand = pairwise_sum(c.row_mean) / md;
    c.shift.resize(m);
    for (std::size_t i = 0; i < m; ++i) c.shift[i] = c.grand - c.row_mean[i];
    return c;
}

// (1/m^2) sum_ij A_ij B_ij: diagonal terms plus twice the off-diagonal half.
double centred_product(const kernels::CenteredView& a, const kernels::CenteredView& b, unsigned threads) {
    const std::size_t m = a.values.size();
    const std::size_t blocks = block_count(m);
    std::vector<double> partial(blocks, 0.0);
    parallel_chunks(blocks, threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t blk = b0; blk < b1; ++blk) {
            const std::size_t lo = blk * kBlockRows, hi = std::min(m, lo + kBlockRows);
            partial[blk] = kernels::centered_cross_sum(a, b, lo, hi);
        }
    });
    std::vector<double> diag(m);
    for (std::size_t i = 0; i < m; ++i) diag[i] = (a.shift[i] - a.row_mean[i]) * (b.shift[i] - b.row_mean[i]);
    const double md = static_cast<double>(m);
    return (pairwise_sum(diag) + 2.0 * pairwise_sum(partial)) / (md * md);
}

void check_pair(std::span<const double> xs, std::span<const double> ys) {
    require(xs.size() == ys.size(), "xs and ys must have equal length");
    require(xs.size() >= 2, "at least two pairs are required");
    for (std::size_t i = 0; i < xs.size(); ++i)
        require(std::isfinite(xs[i]) && std::isfinite(ys[i]), "sample values must be finite");
}

}  // namespace

void PairedSample::validate(std::size_t min_size) const {
    require(xs.size() == ys.size(), "xs and ys must have equal length");
    require(xs.size() >= min_size, "sample too small");
    for (std::size_t i = 0; i < xs.size(); ++i)
        require(std::isfinite(xs[i]) && std::isfinite(ys[i]), "sample values must be finite");
}

double dcov2_vstat(std::span<const double> xs, std::span<const double> ys, unsigned threads) {
    check_pair(xs, ys);
    const Centring cx = centring(xs, threads);
    const Centring cy = centring(ys, threads);
    return centred_product(cx.view(xs), cy.view(ys), threads);
}

double dcov2_vstat(const PairedSample& s, unsigned threads) { return dcov2_vstat(s.xs, s.ys, threads); }

DcorResult dcor(const PairedSample& s, unsigned threads) {
    s.validate();
    const Centring cx = centring(s.xs, threads);
    const Centring cy = centring(s.ys, threads);
    DcorResult r;
    r.dcov2_xy = centred_product(cx.view(s.xs), cy.view(s.ys), threads);
    r.dcov2_xx = centred_product(cx.view(s.xs), cx.view(s.xs), threads);
    r.dcov2_yy = centred_product(cy.view(s.ys), cy.view(s.ys), threads);
    if (!(r.dcov2_xx > 1e-13 * cx.grand * cx.grand) || cx.grand == 0.0)
        throw DegenerateMarginal("degenerate marginal: dCov(X,X) is zero");
    if (!(r.dcov2_yy > 1e-13 * cy.grand * cy.grand) || cy.grand == 0.0)
        throw DegenerateMarginal("degenerate marginal: dCov(Y,Y) is zero");
    const double raw = std::sqrt(std::max(r.dcov2_xy, 0.0)) / std::sqrt(std::sqrt(r.dcov2_xx * r.dcov2_yy));
    r.clipped = r.dcov2_xy < 0.0 || raw > 1.0;
    r.value = std::clamp(raw, 0.0, 1.0);
    return r;
}

PermutationResult perm_test_dcor(const PairedSample& s, std::uint64_t permutations, std::uint64_t seed,
                                 unsigned threads) {
    s.validate();
    require(permutations >= 99, "a permutation test needs at least 99 permutations");
    const DcorResult observed = dcor(s, threads);
    const std::size_t m = s.size();
    const Centring cx = centring(s.xs, threads);
    const Centring cy = centring(s.ys, threads);
    const double obs = centred_product(cx.view(s.xs), cy.view(s.ys), 1);

    std::vector<std::uint8_t> hit(permutations, 0);
    parallel_chunks(permutations, threads, [&](std::size_t r0, std::size_t r1) {
        std::vector<std::size_t> perm(m);
        std::vector<double> y(m), shift(m), row_mean(m);
        for (std::size_t r = r0; r < r1; ++r) {
            rng::Stream stream(seed, r, rng::Domain::permutation);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            for (std::size_t i = m - 1; i > 0; --i)
                std::swap(perm[i], perm[stream.bounded(static_cast<std::uint32_t>(i + 1))]);
            for (std::size_t i = 0; i < m; ++i) {
                y[i] = s.ys[perm[i]];
                shift[i] = cy.shift[perm[i]];
                row_mean[i] = cy.row_mean[perm[i]];
            }
            const double v = centred_product(cx.view(s.xs), {y, shift, row_mean}, 1);
            hit[r] = v >= obs ? 1 : 0;
        }
    });
    PermutationResult res;
    res.statistic = observed.value;
    res.permutations = permutations;
    for (auto h : hit) res.at_least += h;
    res.p_value = static_cast<double>(1 + res.at_least) / static_cast<double>(permutations + 1);
    return res;
}

double cov_sym_abs_diff(const PairedSample& s, unsigned threads) {
    s.validate();
    const std::size_t m = s.size();
    const std::size_t blocks = block_count(m);
    std::vector<double> sx(blocks), sy(blocks), sxy(blocks);
    parallel_chunks(blocks, threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t lo = b * kBlockRows, hi = std::min(m, lo + kBlockRows);
            const kernels::PairSums p = kernels::pair_abs_diff_sums(s.xs, s.ys, lo, hi);
            sx[b] = p.sum_x;
            sy[b] = p.sum_y;
            sxy[b] = p.sum_xy;
        }
    });
    const double pairs = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
    return pairwise_sum(sxy) / pairs - (pairwise_sum(sx) / pairs) * (pairwise_sum(sy) / pairs);
}

CovEstimate cov_sym_abs_diff_bootstrap(const PairedSample& s, unsigned replicas, std::uint64_t seed,
                                       unsigned threads) {
    s.validate();
    require(replicas >= 2, "bootstrap needs at least two replicas");
    CovEstimate est;
    est.value = cov_sym_abs_diff(s, threads);
    est.replicas = replicas;
    const std::size_t m = s.size();
    std::vector<double> stats(replicas);
    parallel_chunks(replicas, threads, [&](std::size_t r0, std::size_t r1) {
        PairedSample resample;
        resample.xs.resize(m);
        resample.ys.resize(m);
        for (std::size_t r = r0; r < r1; ++r) {
            rng::Stream stream(seed, r, rng::Domain::bootstrap);
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t k = stream.bounded(static_cast<std::uint32_t>(m));
                resample.xs[i] = s.xs[k];
                resample.ys[i] = s.ys[k];
            }
            stats[r] = cov_sym_abs_diff(resample, 1);
        }
    });
    const double mean = pairwise_sum(stats) / replicas;
    for (double& v : stats) v = (v - mean) * (v - mean);
    est.bootstrap_stderr = std::sqrt(pairwise_sum(stats) / (replicas - 1));
    return est;
}

}  // namespace roulette::energy
