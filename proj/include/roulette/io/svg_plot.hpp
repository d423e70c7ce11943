#pragma once

// Static SVG chart of p_n against ln n. Output depends only on the inputs.

#include <cstdint>
#include <filesystem>
#include <string>

#include "roulette/exact/recurrence.hpp"
#include "roulette/waves/analyzer.hpp"

namespace roulette::io {

struct PlotOptions {
    std::uint64_t min_n = 3;  ///< entries below are left out; p_1 = 1 would flatten the axis
    int width = 800;
    int height = 480;
    std::string title = "p_n against ln n";
    /// Draws the smoothed curve, the level c and the detected extrema.
    const waves::WaveModel* overlay = nullptr;
};

/// Markers: exact = circle, certified = square, monte_carlo = diamond with a
/// +-err_radius bar. Throws ValidationError when no entry has n >= min_n.
std::string render_svg(const exact::PSeries& series, const PlotOptions& options = {});

void emit_plot(const exact::PSeries& series, const std::filesystem::path& path, const PlotOptions& options = {});

}  // namespace roulette::io
