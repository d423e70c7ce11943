#include <atomic>

#include "roulette/common.hpp"
#include "roulette/kernels/kernels.hpp"

namespace roulette::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

std::atomic<Isa>& selected() {
    static std::atomic<Isa> isa{detected_isa()};
    return isa;
}

}  // namespace

const char* isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) noexcept {
    if (isa == Isa::scalar) return true;
    static const bool avx2 = cpu_has_avx2();
    return avx2;
}

Isa detected_isa() noexcept { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() noexcept { return selected().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    require(isa_supported(isa), std::string("ISA not supported on this CPU: ") + isa_name(isa));
    selected().store(isa, std::memory_order_relaxed);
}

void abs_diff_row_sums(std::span<const double> x, std::size_t row_begin, std::size_t row_end,
                       std::span<double> out) {
    if (active_isa() == Isa::avx2) return avx2::abs_diff_row_sums(x, row_begin, row_end, out);
    scalar::abs_diff_row_sums(x, row_begin, row_end, out);
}

PairSums pair_abs_diff_sums(std::span<const double> x, std::span<const double> y, std::size_t row_begin,
                            std::size_t row_end) {
    if (active_isa() == Isa::avx2) return avx2::pair_abs_diff_sums(x, y, row_begin, row_end);
    return scalar::pair_abs_diff_sums(x, y, row_begin, row_end);
}

double centered_cross_sum(const CenteredView& a, const CenteredView& b, std::size_t row_begin,
                          std::size_t row_end) {
    if (active_isa() == Isa::avx2) return avx2::centered_cross_sum(a, b, row_begin, row_end);
    return scalar::centered_cross_sum(a, b, row_begin, row_end);
}

std::size_t count_zero_bytes(std::span<const std::uint8_t> bytes) {
    if (active_isa() == Isa::avx2) return avx2::count_zero_bytes(bytes);
    return scalar::count_zero_bytes(bytes);
}

}  // namespace roulette::kernels
