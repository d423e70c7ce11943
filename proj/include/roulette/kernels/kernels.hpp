#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and an AVX2
// variant; the active one is chosen at runtime from CPUID. Both variants
// accumulate into four lanes in the same element-to-lane order and fold the
// lanes as (l0 + l1) + (l2 + l3), so their results are bitwise identical.

#include <cstddef>
#include <cstdint>
#include <span>

namespace roulette::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;
/// Best ISA the running CPU supports.
Isa detected_isa() noexcept;
Isa active_isa() noexcept;
/// Forces dispatch to `isa`; throws ValidationError if unsupported.
void set_isa(Isa isa);

struct PairSums {
    double sum_x = 0.0;   ///< sum of |x_i - x_j|
    double sum_y = 0.0;   ///< sum of |y_i - y_j|
    double sum_xy = 0.0;  ///< sum of |x_i - x_j| * |y_i - y_j|
};

/// Centered inputs for one coordinate: A_ij = (|v_i - v_j| + shift_i) - row_mean_j
/// with shift_i = grand_mean - row_mean_i.
struct CenteredView {
    std::span<const double> values;
    std::span<const double> shift;
    std::span<const double> row_mean;
};

/// out[i - row_begin] = sum_j |x_i - x_j| for rows in [row_begin, row_end).
void abs_diff_row_sums(std::span<const double> x, std::size_t row_begin, std::size_t row_end,
                       std::span<double> out);

/// Sums over pairs i < j with i in [row_begin, row_end).
PairSums pair_abs_diff_sums(std::span<const double> x, std::span<const double> y, std::size_t row_begin,
                            std::size_t row_end);

/// sum over pairs i < j, i in [row_begin, row_end), of A_ij * B_ij.
double centered_cross_sum(const CenteredView& a, const CenteredView& b, std::size_t row_begin,
                          std::size_t row_end);

std::size_t count_zero_bytes(std::span<const std::uint8_t> bytes);

namespace scalar {
void abs_diff_row_sums(std::span<const double>, std::size_t, std::size_t, std::span<double>);
PairSums pair_abs_diff_sums(std::span<const double>, std::span<const double>, std::size_t, std::size_t);
double centered_cross_sum(const CenteredView&, const CenteredView&, std::size_t, std::size_t);
std::size_t count_zero_bytes(std::span<const std::uint8_t>);
}  // namespace scalar

namespace avx2 {
void abs_diff_row_sums(std::span<const double>, std::size_t, std::size_t, std::span<double>);
PairSums pair_abs_diff_sums(std::span<const double>, std::span<const double>, std::size_t, std::size_t);
double centered_cross_sum(const CenteredView&, const CenteredView&, std::size_t, std::size_t);
std::size_t count_zero_bytes(std::span<const std::uint8_t>);
}  // namespace avx2

}  // namespace roulette::kernels
