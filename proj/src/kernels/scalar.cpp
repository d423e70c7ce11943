#include <array>
#include <cmath>

#include "roulette/kernels/kernels.hpp"

namespace roulette::kernels::scalar {

namespace {

using Lanes = std::array<double, 4>;

inline double fold(const Lanes& l) { return (l[0] + l[1]) + (l[2] + l[3]); }

}  // namespace

void abs_diff_row_sums(std::span<const double> x, std::size_t row_begin, std::size_t row_end,
                       std::span<double> out) {
    const std::size_t m = x.size();
    for (std::size_t i = row_begin; i < row_end; ++i) {
        Lanes acc{};
        const double xi = x[i];
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4)
            for (std::size_t l = 0; l < 4; ++l) acc[l] += std::fabs(xi - x[j + l]);
        for (std::size_t l = 0; l < 4; ++l) acc[l] += (j + l < m) ? std::fabs(xi - x[j + l]) : 0.0;
        out[i - row_begin] = fold(acc);
    }
}

PairSums pair_abs_diff_sums(std::span<const double> x, std::span<const double> y, std::size_t row_begin,
                            std::size_t row_end) {
    const std::size_t m = x.size();
    Lanes ax{}, ay{}, axy{};
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const double xi = x[i], yi = y[i];
        std::size_t j = i + 1;
        for (; j + 4 <= m; j += 4) {
            for (std::size_t l = 0; l < 4; ++l) {
                const double dx = std::fabs(xi - x[j + l]);
                const double dy = std::fabs(yi - y[j + l]);
                ax[l] += dx;
                ay[l] += dy;
                axy[l] += dx * dy;
            }
        }
        if (j < m) {
            for (std::size_t l = 0; l < 4; ++l) {
                const bool live = j + l < m;
                const double dx = live ? std::fabs(xi - x[j + l]) : 0.0;
                const double dy = live ? std::fabs(yi - y[j + l]) : 0.0;
                ax[l] += dx;
                ay[l] += dy;
                axy[l] += live ? dx * dy : 0.0;
            }
        }
    }
    return {fold(ax), fold(ay), fold(axy)};
}

double centered_cross_sum(const CenteredView& a, const CenteredView& b, std::size_t row_begin,
                          std::size_t row_end) {
    const std::size_t m = a.values.size();
    Lanes acc{};
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const double xi = a.values[i], sx = a.shift[i];
        const double yi = b.values[i], sy = b.shift[i];
        std::size_t j = i + 1;
        for (; j + 4 <= m; j += 4) {
            for (std::size_t l = 0; l < 4; ++l) {
                const double ca = (std::fabs(xi - a.values[j + l]) + sx) - a.row_mean[j + l];
                const double cb = (std::fabs(yi - b.values[j + l]) + sy) - b.row_mean[j + l];
                acc[l] += ca * cb;
            }
        }
        if (j < m) {
            for (std::size_t l = 0; l < 4; ++l) {
                if (j + l < m) {
                    const double ca = (std::fabs(xi - a.values[j + l]) + sx) - a.row_mean[j + l];
                    const double cb = (std::fabs(yi - b.values[j + l]) + sy) - b.row_mean[j + l];
                    acc[l] += ca * cb;
                } else {
                    acc[l] += 0.0;
                }
            }
        }
    }
    return fold(acc);
}

std::size_t count_zero_bytes(std::span<const std::uint8_t> bytes) {
    std::size_t zeros = 0;
    for (const std::uint8_t b : bytes) zeros += (b == 0);
    return zeros;
}

}  // namespace roulette::kernels::scalar
