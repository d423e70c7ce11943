#include "roulette/kernels/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>

namespace roulette::kernels::avx2 {

namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline double fold(__m256d v) {
    alignas(32) double l[4];
    _mm256_store_pd(l, v);
    return (l[0] + l[1]) + (l[2] + l[3]);
}

inline __m256i tail_mask(std::size_t live) {
    const __m256i lane = _mm256_setr_epi64x(0, 1, 2, 3);
    return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(live)), lane);
}

}  // namespace

void abs_diff_row_sums(std::span<const double> x, std::size_t row_begin, std::size_t row_end,
                       std::span<double> out) {
    const std::size_t m = x.size();
    const double* px = x.data();
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const __m256d xi = _mm256_set1_pd(px[i]);
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) acc = _mm256_add_pd(acc, abs_pd(_mm256_sub_pd(xi, _mm256_loadu_pd(px + j))));
        if (j < m) {
            const __m256i mask = tail_mask(m - j);
            const __m256d d = abs_pd(_mm256_sub_pd(xi, _mm256_maskload_pd(px + j, mask)));
            acc = _mm256_add_pd(acc, _mm256_and_pd(d, _mm256_castsi256_pd(mask)));
        }
        out[i - row_begin] = fold(acc);
    }
}

PairSums pair_abs_diff_sums(std::span<const double> x, std::span<const double> y, std::size_t row_begin,
                            std::size_t row_end) {
    const std::size_t m = x.size();
    const double* px = x.data();
    const double* py = y.data();
    __m256d ax = _mm256_setzero_pd(), ay = _mm256_setzero_pd(), axy = _mm256_setzero_pd();
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const __m256d xi = _mm256_set1_pd(px[i]);
        const __m256d yi = _mm256_set1_pd(py[i]);
        std::size_t j = i + 1;
        for (; j + 4 <= m; j += 4) {
            const __m256d dx = abs_pd(_mm256_sub_pd(xi, _mm256_loadu_pd(px + j)));
            const __m256d dy = abs_pd(_mm256_sub_pd(yi, _mm256_loadu_pd(py + j)));
            ax = _mm256_add_pd(ax, dx);
            ay = _mm256_add_pd(ay, dy);
            axy = _mm256_add_pd(axy, _mm256_mul_pd(dx, dy));
        }
        if (j < m) {
            const __m256i mask = tail_mask(m - j);
            const __m256d live = _mm256_castsi256_pd(mask);
            const __m256d dx = _mm256_and_pd(abs_pd(_mm256_sub_pd(xi, _mm256_maskload_pd(px + j, mask))), live);
            const __m256d dy = _mm256_and_pd(abs_pd(_mm256_sub_pd(yi, _mm256_maskload_pd(py + j, mask))), live);
            ax = _mm256_add_pd(ax, dx);
            ay = _mm256_add_pd(ay, dy);
            axy = _mm256_add_pd(axy, _mm256_mul_pd(dx, dy));
        }
    }
    return {fold(ax), fold(ay), fold(axy)};
}

double centered_cross_sum(const CenteredView& a, const CenteredView& b, std::size_t row_begin,
                          std::size_t row_end) {
    const std::size_t m = a.values.size();
    const double *pa = a.values.data(), *ra = a.row_mean.data();
    const double *pb = b.values.data(), *rb = b.row_mean.data();
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const __m256d xi = _mm256_set1_pd(pa[i]), sx = _mm256_set1_pd(a.shift[i]);
        const __m256d yi = _mm256_set1_pd(pb[i]), sy = _mm256_set1_pd(b.shift[i]);
        std::size_t j = i + 1;
        for (; j + 4 <= m; j += 4) {
            const __m256d ca = _mm256_sub_pd(
                _mm256_add_pd(abs_pd(_mm256_sub_pd(xi, _mm256_loadu_pd(pa + j))), sx), _mm256_loadu_pd(ra + j));
            const __m256d cb = _mm256_sub_pd(
                _mm256_add_pd(abs_pd(_mm256_sub_pd(yi, _mm256_loadu_pd(pb + j))), sy), _mm256_loadu_pd(rb + j));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(ca, cb));
        }
        if (j < m) {
            const __m256i mask = tail_mask(m - j);
            const __m256d ca = _mm256_sub_pd(
                _mm256_add_pd(abs_pd(_mm256_sub_pd(xi, _mm256_maskload_pd(pa + j, mask))), sx),
                _mm256_maskload_pd(ra + j, mask));
            const __m256d cb = _mm256_sub_pd(
                _mm256_add_pd(abs_pd(_mm256_sub_pd(yi, _mm256_maskload_pd(pb + j, mask))), sy),
                _mm256_maskload_pd(rb + j, mask));
            acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_mul_pd(ca, cb), _mm256_castsi256_pd(mask)));
        }
    }
    return fold(acc);
}

std::size_t count_zero_bytes(std::span<const std::uint8_t> bytes) {
    const std::size_t n = bytes.size();
    const std::uint8_t* p = bytes.data();
    const __m256i zero = _mm256_setzero_si256();
    std::size_t zeros = 0;
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
        const auto bits = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, zero)));
        zeros += static_cast<std::size_t>(__builtin_popcount(bits));
    }
    for (; i < n; ++i) zeros += (p[i] == 0);
    return zeros;
}

}  // namespace roulette::kernels::avx2

#else

#include "roulette/kernels/kernels.hpp"

// Non-x86 builds: the AVX2 entry points forward to the scalar reference and
// isa_supported(Isa::avx2) reports false, so dispatch never selects them.
namespace roulette::kernels::avx2 {
void abs_diff_row_sums(std::span<const double> x, std::size_t b, std::size_t e, std::span<double> out) {
    scalar::abs_diff_row_sums(x, b, e, out);
}
PairSums pair_abs_diff_sums(std::span<const double> x, std::span<const double> y, std::size_t b, std::size_t e) {
    return scalar::pair_abs_diff_sums(x, y, b, e);
}
double centered_cross_sum(const CenteredView& a, const CenteredView& c, std::size_t b, std::size_t e) {
    return scalar::centered_cross_sum(a, c, b, e);
}
std::size_t count_zero_bytes(std::span<const std::uint8_t> bytes) { return scalar::count_zero_bytes(bytes); }
}  // namespace roulette::kernels::avx2

#endif
