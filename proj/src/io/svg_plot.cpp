#include "roulette/io/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "roulette/common.hpp"
#include "roulette/io/atomic_file.hpp"

namespace roulette::io {

namespace {

constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

/// 1, 2 or 5 times a power of ten, giving roughly `target` intervals.
double tick_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (const double m : {1.0, 2.0, 5.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

struct Frame {
    double x0, x1, y0, y1, w, h;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (w - kLeft - kRight); }
    double py(double y) const { return h - kBottom - (y - y0) / (y1 - y0) * (h - kTop - kBottom); }
};

}  // namespace

std::string render_svg(const exact::PSeries& series, const PlotOptions& options) {
    require(options.width > kLeft + kRight + 10 && options.height > kTop + kBottom + 10, "plot is too small");
    std::vector<const exact::PEntry*> pts;
    for (const auto& e : series.entries)
        if (e.n >= std::max<std::uint64_t>(options.min_n, 1)) pts.push_back(&e);
    require(!pts.empty(), "nothing to plot: series has no entry with n >= " + std::to_string(options.min_n));

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto* e : pts) {
        const double x = std::log(static_cast<double>(e->n));
        const double bar = e->provenance == exact::Provenance::monte_carlo ? e->err_radius : 0.0;
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, e->value - bar);
        ymax = std::max(ymax, e->value + bar);
    }
    if (options.overlay) ymin = std::min(ymin, options.overlay->c), ymax = std::max(ymax, options.overlay->c);
    if (xmax - xmin < 1e-9) xmin -= 0.5, xmax += 0.5;
    if (ymax - ymin < 1e-12) ymin -= 0.05, ymax += 0.05;
    const double padx = 0.03 * (xmax - xmin), pady = 0.06 * (ymax - ymin);
    const Frame f{xmin - padx, xmax + padx, ymin - pady, ymax + pady, double(options.width), double(options.height)};

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) + "\" height=\"" +
         std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) + ' ' +
         std::to_string(options.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(f.w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(options.title) +
         "</text>\n";

    // Axes and ticks.
    const double ax0 = f.px(f.x0), ax1 = f.px(f.x1), ay0 = f.py(f.y0), ay1 = f.py(f.y1);
    s += "<g stroke=\"black\" fill=\"none\"><rect x=\"" + num(ax0) + "\" y=\"" + num(ay1) + "\" width=\"" +
         num(ax1 - ax0) + "\" height=\"" + num(ay0 - ay1) + "\"/></g>\n";
    s += "<g class=\"ticks\" stroke=\"#999\" stroke-width=\"0.5\">\n";
    std::string tick_labels;
    const double xs = tick_step(f.x1 - f.x0, 8), ys = tick_step(f.y1 - f.y0, 6);
    for (double t = std::ceil(f.x0 / xs) * xs; t <= f.x1; t += xs) {
        const double x = f.px(t);
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(ay0) + "\" x2=\"" + num(x) + "\" y2=\"" + num(ay1) + "\"/>\n";
        tick_labels += "<text x=\"" + num(x) + "\" y=\"" + num(ay0 + 16) + "\" text-anchor=\"middle\">" +
                       label(std::abs(t) < xs * 1e-9 ? 0.0 : t) + "</text>\n";
    }
    for (double t = std::ceil(f.y0 / ys) * ys; t <= f.y1; t += ys) {
        const double y = f.py(t);
        s += "<line x1=\"" + num(ax0) + "\" y1=\"" + num(y) + "\" x2=\"" + num(ax1) + "\" y2=\"" + num(y) + "\"/>\n";
        tick_labels += "<text x=\"" + num(ax0 - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
                       label(std::abs(t) < ys * 1e-9 ? 0.0 : t) + "</text>\n";
    }
    s += "</g>\n<g class=\"tick-labels\">\n" + tick_labels + "</g>\n";
    s += "<text x=\"" + num((ax0 + ax1) / 2) + "\" y=\"" + num(f.h - 12) + "\" text-anchor=\"middle\">ln n</text>\n";
    s += "<text x=\"16\" y=\"" + num((ay0 + ay1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num((ay0 + ay1) / 2) + ")\">p_n</text>\n";

    if (const auto* m = options.overlay) {
        s += "<line class=\"c-level\" x1=\"" + num(ax0) + "\" y1=\"" + num(f.py(m->c)) + "\" x2=\"" + num(ax1) +
             "\" y2=\"" + num(f.py(m->c)) + "\" stroke=\"#2a7\" stroke-dasharray=\"6 4\"/>\n";
        if (!m->points.empty()) {
            s += "<polyline class=\"smoothed\" fill=\"none\" stroke=\"#c33\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < m->points.size(); ++i)
                s += (i ? " " : "") + num(f.px(m->points[i].log_n)) + ',' + num(f.py(m->points[i].smoothed));
            s += "\"/>\n";
        }
        for (const auto& e : m->extrema) {
            const double x = f.px(e.position);
            s += "<line class=\"extremum\" x1=\"" + num(x) + "\" y1=\"" + num(ay0) + "\" x2=\"" + num(x) +
                 "\" y2=\"" + num(ay1) + "\" stroke=\"" + (e.kind == waves::ExtremumKind::peak ? "#c33" : "#36c") +
                 "\" stroke-dasharray=\"2 3\"/>\n";
        }
    }

    s += "<g class=\"points\">\n";
    for (const auto* e : pts) {
        const double x = f.px(std::log(static_cast<double>(e->n))), y = f.py(e->value);
        switch (e->provenance) {
            case exact::Provenance::exact:
                s += "<circle class=\"exact\" cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"2.5\" fill=\"black\"/>\n";
                break;
            case exact::Provenance::certified:
                s += "<rect class=\"certified\" x=\"" + num(x - 2.5) + "\" y=\"" + num(y - 2.5) +
                     "\" width=\"5\" height=\"5\" fill=\"#555\"/>\n";
                break;
            case exact::Provenance::monte_carlo:
                s += "<line class=\"errbar\" x1=\"" + num(x) + "\" y1=\"" + num(f.py(e->value - e->err_radius)) +
                     "\" x2=\"" + num(x) + "\" y2=\"" + num(f.py(e->value + e->err_radius)) +
                     "\" stroke=\"#36c\" stroke-width=\"1\"/>\n";
                s += "<path class=\"mc\" d=\"M" + num(x) + ' ' + num(y - 3.5) + " L" + num(x + 3.5) + ' ' + num(y) +
                     " L" + num(x) + ' ' + num(y + 3.5) + " L" + num(x - 3.5) + ' ' + num(y) +
                     " Z\" fill=\"#36c\"/>\n";
                break;
        }
    }
    s += "</g>\n</svg>\n";
    return s;
}

void emit_plot(const exact::PSeries& series, const std::filesystem::path& path, const PlotOptions& options) {
    write_atomic(path, render_svg(series, options));
}

}  // namespace roulette::io
