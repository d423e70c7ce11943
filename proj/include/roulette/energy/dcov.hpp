#pragma once

// Distance covariance and related statistics for paired scalar samples.
// All pairwise sums are accumulated per block of rows and the block partials
// combined in block order, so results do not depend on the thread count.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "roulette/sim/game.hpp"

namespace roulette::energy {

struct PairedSample {
    std::vector<double> xs;
    std::vector<double> ys;

    std::size_t size() const noexcept { return xs.size(); }
    /// Equal lengths, at least `min_size` pairs, finite values.
    void validate(std::size_t min_size = 2) const;
};

class DegenerateMarginal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// V-statistic of E|X-X'||Y-Y'| + E|X-X'| E|Y-Y'| - 2 E|X-X'||Y-Y''| under the
/// empirical distribution, computed as (1/m^2) sum_ij A_ij B_ij with A, B the
/// double-centred distance matrices.
double dcov2_vstat(const PairedSample& s, unsigned threads = 1);
double dcov2_vstat(std::span<const double> xs, std::span<const double> ys, unsigned threads = 1);

struct DcorResult {
    double value = 0.0;   ///< in [0, 1]
    bool clipped = false; ///< raw value fell outside [0, 1]
    double dcov2_xy = 0.0;
    double dcov2_xx = 0.0;
    double dcov2_yy = 0.0;
};

/// dCov(X,Y) / sqrt(dCov(X,X) dCov(Y,Y)) with dCov = sqrt(dCov^2). Throws
/// DegenerateMarginal when dCov^2(X,X) or dCov^2(Y,Y) is at most 1e-13 times
/// the squared mean distance of that coordinate.
DcorResult dcor(const PairedSample& s, unsigned threads = 1);

struct PermutationResult {
    double statistic = 0.0;       ///< observed dCor
    double p_value = 0.0;         ///< (1 + #{dCov^2_perm >= dCov^2_obs}) / (B + 1)
    std::uint64_t permutations = 0;
    std::uint64_t at_least = 0;
};

/// Permutation test of independence. dCov^2(X,X) and dCov^2(Y,Y) do not change
/// under permutation, so the permuted dCov^2(X,Y) is compared directly.
/// Requires B >= 99.
PermutationResult perm_test_dcor(const PairedSample& s, std::uint64_t permutations,
                                 std::uint64_t seed = sim::kDefaultSeed, unsigned threads = 1);

/// mean_{i<j} |x_i-x_j||y_i-y_j| - mean_{i<j} |x_i-x_j| * mean_{i<j} |y_i-y_j|.
double cov_sym_abs_diff(const PairedSample& s, unsigned threads = 1);

struct CovEstimate {
    double value = 0.0;
    double bootstrap_stderr = 0.0;
    unsigned replicas = 0;
};

/// cov_sym_abs_diff with the standard deviation over nonparametric bootstrap
/// resamples of the pairs.
CovEstimate cov_sym_abs_diff_bootstrap(const PairedSample& s, unsigned replicas = 200,
                                       std::uint64_t seed = sim::kDefaultSeed, unsigned threads = 1);

}  // namespace roulette::energy
