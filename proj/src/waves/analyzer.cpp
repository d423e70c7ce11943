#include "roulette/waves/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "roulette/common.hpp"
#include "roulette/parallel.hpp"

namespace roulette::waves {

std::uint64_t grid_point_seed(std::uint64_t seed, std::uint64_t n) noexcept {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    return mix(seed ^ mix(n));
}

std::vector<std::uint64_t> log_grid(std::uint64_t n0, std::uint64_t n1, double per_unit) {
    require(n0 >= 1 && n1 >= n0, "log grid needs 1 <= n0 <= n1");
    require(per_unit > 0.0 && std::isfinite(per_unit), "points per unit must be positive");
    std::vector<std::uint64_t> grid;
    for (unsigned i = 0;; ++i) {
        const double v = std::round(static_cast<double>(n1) * std::exp(-(i / per_unit)));
        if (v < static_cast<double>(n0)) break;
        const auto n = static_cast<std::uint64_t>(v);
        if (grid.empty() || n < grid.back()) grid.push_back(n);
    }
    std::reverse(grid.begin(), grid.end());
    return grid;
}

exact::PSeries build_series(unsigned exact_to, const std::vector<std::uint64_t>& mc_grid, std::uint64_t reps,
                            std::uint64_t seed, const SeriesOptions& options) {
    for (std::size_t i = 0; i < mc_grid.size(); ++i) {
        require(mc_grid[i] > exact_to, "Monte Carlo grid overlaps the exact range");
        require(i == 0 || mc_grid[i] > mc_grid[i - 1], "Monte Carlo grid must be strictly increasing");
    }
    require(mc_grid.empty() || reps >= 1, "reps must be positive");
    exact::PSeries series;
    if (exact_to > 0) series = exact::p_recurrence(exact_to, options.recurrence);
    for (std::uint64_t n : mc_grid) {
        const std::uint64_t s = grid_point_seed(seed, n);
        const sim::McEstimate e = sim::estimate_p(n, reps, s, options.threads);
        exact::PEntry entry;
        entry.n = n;
        entry.provenance = exact::Provenance::monte_carlo;
        entry.value = e.point;
        entry.err_radius = e.std_error;
        entry.reps = reps;
        series.entries.push_back(std::move(entry));
    }
    return series;
}

const char* extremum_kind_name(ExtremumKind k) noexcept { return k == ExtremumKind::peak ? "peak" : "trough"; }

std::vector<Extremum> WaveModel::peaks() const {
    std::vector<Extremum> out;
    for (const auto& e : extrema)
        if (e.kind == ExtremumKind::peak) out.push_back(e);
    return out;
}

std::vector<Extremum> WaveModel::troughs() const {
    std::vector<Extremum> out;
    for (const auto& e : extrema)
        if (e.kind == ExtremumKind::trough) out.push_back(e);
    return out;
}

namespace {

struct Curve {
    std::vector<double> x, y, err, dx;
};

Curve curve_from(const exact::PSeries& series) {
    Curve c;
    std::uint64_t last = 0;
    for (const auto& e : series.entries) {
        if (e.n < 3) continue;
        require(c.x.empty() || e.n > last, "series must be strictly increasing in n");
        last = e.n;
        c.x.push_back(std::log(static_cast<double>(e.n)));
        c.y.push_back(e.value);
        c.err.push_back(e.err_radius);
    }
    const std::size_t m = c.x.size();
    if (m < 5) throw InsufficientOscillation("insufficient oscillation: fewer than five entries with n >= 3");
    c.dx.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double lo = i == 0 ? c.x[0] : 0.5 * (c.x[i - 1] + c.x[i]);
        const double hi = i + 1 == m ? c.x[m - 1] : 0.5 * (c.x[i] + c.x[i + 1]);
        c.dx[i] = hi - lo;
    }
    return c;
}

// Trapezoid mean of v over [x[a], x[b]].
double trapezoid_mean(const std::vector<double>& x, const std::vector<double>& v, std::size_t a, std::size_t b) {
    if (b <= a) return v[a];
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += 0.5 * (v[i] + v[i + 1]) * (x[i + 1] - x[i]);
    return s / (x[b] - x[a]);
}

// Smoothed value i is the mean of the piecewise-linear interpolant over
// [x_i - w/2, x_i + w/2] clipped to the data range: a fixed linear
// combination of the nodes from `first` on.
struct SmoothingRow {
    std::size_t first = 0;
    std::vector<double> weights;
};

std::vector<SmoothingRow> smoothing_rows(const std::vector<double>& x, double w) {
    const std::size_t m = x.size();
    std::vector<SmoothingRow> rows(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double lo = std::max(x.front(), x[i] - 0.5 * w);
        const double hi = std::min(x.back(), x[i] + 0.5 * w);
        SmoothingRow& row = rows[i];
        if (hi - lo <= 0.0) {
            row.first = i;
            row.weights = {1.0};
            continue;
        }
        // Segments [x_k, x_k+1] overlapping (lo, hi).
        std::size_t k0 = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), lo) - x.begin());
        k0 = k0 == 0 ? 0 : k0 - 1;
        row.first = k0;
        for (std::size_t k = k0; k + 1 < m && x[k] < hi; ++k) {
            const double a = std::max(lo, x[k]), b = std::min(hi, x[k + 1]);
            if (b <= a) continue;
            const double h = x[k + 1] - x[k];
            // Integrals of the two hat functions restricted to [a, b].
            const double left = ((x[k + 1] - a) * (x[k + 1] - a) - (x[k + 1] - b) * (x[k + 1] - b)) / (2.0 * h);
            const double right = ((b - x[k]) * (b - x[k]) - (a - x[k]) * (a - x[k])) / (2.0 * h);
            const std::size_t off = k - k0;
            if (row.weights.size() < off + 2) row.weights.resize(off + 2, 0.0);
            row.weights[off] += left / (hi - lo);
            row.weights[off + 1] += right / (hi - lo);
        }
    }
    return rows;
}

std::vector<double> smooth_once(const std::vector<SmoothingRow>& rows, const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < rows[i].weights.size(); ++j) s += rows[i].weights[j] * v[rows[i].first + j];
        out[i] = s;
    }
    return out;
}

// Vertex of the dx-weighted least-squares parabola through the points within
// half_width of x[best] (at least best-1..best+1), clamped to their range.
std::pair<double, double> refine_vertex(const std::vector<double>& x, const std::vector<double>& v,
                                        const std::vector<double>& dx, std::size_t best, double half_width,
                                        bool is_peak) {
    std::size_t a = best - 1, b = best + 1;
    while (a > 0 && x[best] - x[a - 1] <= half_width) --a;
    while (b + 1 < x.size() && x[b + 1] - x[best] <= half_width) ++b;
    // Normal equations in t = x - x[best] for v = q0 + q1 t + q2 t^2.
    double s[5] = {0, 0, 0, 0, 0}, r[3] = {0, 0, 0};
    for (std::size_t i = a; i <= b; ++i) {
        const double t = x[i] - x[best];
        const double w = dx[i] > 0.0 ? dx[i] : 1.0;
        double tp = w;
        for (int k = 0; k < 5; ++k) {
            s[k] += tp;
            if (k < 3) r[k] += tp * v[i];
            tp *= t;
        }
    }
    const double m[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
    auto det3 = [](const double q[3][3]) {
        return q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1]) - q[0][1] * (q[1][0] * q[2][2] - q[1][2] * q[2][0]) +
               q[0][2] * (q[1][0] * q[2][1] - q[1][1] * q[2][0]);
    };
    const double d = det3(m);
    if (d == 0.0) return {x[best], v[best]};
    double q[3];
    for (int col = 0; col < 3; ++col) {
        double mc[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) mc[i][j] = j == col ? r[i] : m[i][j];
        q[col] = det3(mc) / d;
    }
    if (is_peak ? q[2] >= 0.0 : q[2] <= 0.0) return {x[best], v[best]};
    const double t = std::clamp(-q[1] / (2.0 * q[2]), x[a] - x[best], x[b] - x[best]);
    return {x[best] + t, q[0] + t * (q[1] + t * q[2])};
}

struct RawExtremum {
    std::size_t index;
    double position;
    double value;
    ExtremumKind kind;
};

// Hysteresis segmentation of v around c; one extremum per above/below run.
std::vector<RawExtremum> segment_extrema(const std::vector<double>& x, const std::vector<double>& v,
                                         const std::vector<double>& dx, double c, double band, double half_width) {
    const std::size_t m = v.size();
    std::vector<RawExtremum> out;
    int state = 0;
    std::size_t run_start = 0;
    auto close_run = [&](std::size_t end) {
        if (state == 0) return;
        std::size_t best = run_start;
        for (std::size_t i = run_start; i < end; ++i)
            if (state > 0 ? v[i] > v[best] : v[i] < v[best]) best = i;
        if (best == 0 || best + 1 >= m) return;
        const bool is_peak = state > 0;
        if (is_peak ? (v[best - 1] > v[best] || v[best + 1] > v[best])
                    : (v[best - 1] < v[best] || v[best + 1] < v[best]))
            return;
        const auto [pos, val] = refine_vertex(x, v, dx, best, half_width, is_peak);
        out.push_back({best, pos, val, is_peak ? ExtremumKind::peak : ExtremumKind::trough});
    };
    for (std::size_t i = 0; i < m; ++i) {
        const int next = v[i] > c + band ? 1 : (v[i] < c - band ? -1 : state);
        if (next != state) {
            close_run(i);
            state = next;
            run_start = i;
        }
    }
    close_run(m);
    return out;
}

std::vector<double> crossing_positions(const std::vector<double>& x, const std::vector<double>& v, double c,
                                       double band, int direction) {
    std::vector<double> out;
    int state = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const int next = v[i] > c + band ? 1 : (v[i] < c - band ? -1 : state);
        if (next != state && state != 0 && next == direction) out.push_back(x[i]);
        state = next;
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

struct Detection {
    double c = 0.0;
    double window = 0.0;
    std::vector<double> smoothed;
    std::vector<RawExtremum> extrema;
};

double hysteresis_band(const Curve& curve, const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return std::max(3.0 * median(curve.err), 0.05 * 0.5 * (*hi - *lo));
}

double initial_window(const Curve& curve, unsigned divisor) {
    const double c0 = trapezoid_mean(curve.x, curve.y, 0, curve.x.size() - 1);
    const double band = hysteresis_band(curve, curve.y);
    std::vector<double> gaps;
    for (int dir : {1, -1}) {
        const auto cross = crossing_positions(curve.x, curve.y, c0, band, dir);
        for (std::size_t i = 1; i < cross.size(); ++i) gaps.push_back(cross[i] - cross[i - 1]);
    }
    if (gaps.size() < 2) throw InsufficientOscillation("insufficient oscillation: fewer than two level crossings");
    return median(gaps) / divisor;
}

Detection detect_core(const Curve& curve, const std::vector<double>& y, double window, double period) {
    Detection d;
    d.window = window;
    const auto rows = smoothing_rows(curve.x, window);
    d.smoothed = smooth_once(rows, smooth_once(rows, y));
    const auto [mn, mx] = std::minmax_element(d.smoothed.begin(), d.smoothed.end());
    if (*mx - *mn <= 0.0) throw InsufficientOscillation("insufficient oscillation: series is flat");
    const double band = hysteresis_band(curve, d.smoothed);
    d.c = trapezoid_mean(curve.x, d.smoothed, 0, curve.x.size() - 1);
    for (int pass = 0; pass < 2; ++pass) {
        d.extrema = segment_extrema(curve.x, d.smoothed, curve.dx, d.c, band, period / 8.0);
        std::vector<std::size_t> peak_idx;
        for (const auto& e : d.extrema)
            if (e.kind == ExtremumKind::peak) peak_idx.push_back(e.index);
        if (peak_idx.size() < 2) throw InsufficientOscillation("insufficient oscillation: fewer than two peaks");
        if (pass == 0) d.c = trapezoid_mean(curve.x, d.smoothed, peak_idx.front(), peak_idx.back());
    }
    return d;
}

// Standard deviation of smoothed[i] from independent entry errors, through both passes.
double propagated_error(const Curve& curve, const std::vector<SmoothingRow>& rows, std::size_t i) {
    std::vector<double> coef(curve.x.size(), 0.0);
    for (std::size_t a = 0; a < rows[i].weights.size(); ++a) {
        const SmoothingRow& inner = rows[rows[i].first + a];
        for (std::size_t b = 0; b < inner.weights.size(); ++b)
            coef[inner.first + b] += rows[i].weights[a] * inner.weights[b];
    }
    double var = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) var += coef[j] * coef[j] * curve.err[j] * curve.err[j];
    return std::sqrt(var);
}

}  // namespace

WaveModel detect_waves(const exact::PSeries& series, unsigned window_divisor, const WaveOptions& options) {
    require(window_divisor >= 1, "window divisor must be positive");
    const Curve curve = curve_from(series);
    const double window = initial_window(curve, window_divisor);
    const Detection det = detect_core(curve, curve.y, window, window * window_divisor);

    WaveModel model;
    model.c = det.c;
    model.window = det.window;
    const auto rows = smoothing_rows(curve.x, window);
    for (const auto& r : det.extrema) {
        Extremum e;
        e.position = r.position;
        e.amplitude = r.value - det.c;
        e.amplitude_error = propagated_error(curve, rows, r.index);
        e.kind = r.kind;
        model.extrema.push_back(e);
    }
    double last_peak = -1.0;
    bool have_peak = false;
    for (const auto& e : model.extrema) {
        if (e.kind != ExtremumKind::peak) continue;
        if (have_peak) model.period_estimates.push_back(e.position - last_peak);
        last_peak = e.position;
        have_peak = true;
    }
    for (std::size_t i = 0; i < curve.x.size(); ++i)
        model.points.push_back({curve.x[i], curve.y[i], curve.err[i], det.smoothed[i]});

    const bool noisy = std::any_of(curve.err.begin(), curve.err.end(), [](double e) { return e > 0.0; });
    if (!noisy || options.bootstrap_replicas == 0) return model;

    const unsigned replicas = options.bootstrap_replicas;
    const std::size_t count = model.extrema.size();
    std::vector<std::vector<RawExtremum>> results(replicas);
    std::vector<double> centres(replicas, 0.0);
    parallel_chunks(replicas, options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            rng::Stream stream(options.seed, r, rng::Domain::wave_bootstrap);
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::vector<double> y = curve.y;
            for (std::size_t i = 0; i < y.size(); ++i)
                if (curve.err[i] > 0.0) y[i] += curve.err[i] * gauss(stream);
            try {
                const Detection d = detect_core(curve, y, window, window * window_divisor);
                results[r] = d.extrema;
                centres[r] = d.c;
            } catch (const InsufficientOscillation&) {
                results[r].clear();
            }
        }
    });
    model.bootstrap_replicas = replicas;
    std::vector<std::vector<double>> pos(count), amp(count);
    for (unsigned r = 0; r < replicas; ++r) {
        bool match = results[r].size() == count;
        for (std::size_t k = 0; match && k < count; ++k) match = results[r][k].kind == model.extrema[k].kind;
        if (!match) {
            ++model.bootstrap_failures;
            continue;
        }
        for (std::size_t k = 0; k < count; ++k) {
            pos[k].push_back(results[r][k].position);
            amp[k].push_back(results[r][k].value - centres[r]);
        }
    }
    auto sd = [](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        double mean = 0.0;
        for (double a : v) mean += a;
        mean /= static_cast<double>(v.size());
        double s = 0.0;
        for (double a : v) s += (a - mean) * (a - mean);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
    };
    for (std::size_t k = 0; k < count; ++k) {
        model.extrema[k].position_spread = sd(pos[k]);
        model.extrema[k].amplitude_spread = sd(amp[k]);
    }
    return model;
}

double decay_product(double kappa_prime, double m0) {
    require(kappa_prime >= 0.0 && std::isfinite(kappa_prime), "kappa' must be finite and >= 0");
    double product = 1.0;
    for (unsigned i = 0;; ++i) {
        const double term = kappa_prime * std::exp(-m0 - i);
        if (term >= 1.0) return 0.0;
        product *= 1.0 - term;
        if (term < 1e-17) break;
    }
    return product;
}

DecayFit fit_wave_decay(const WaveModel& model) {
    std::vector<Extremum> chosen = model.peaks();
    if (chosen.size() < 3) chosen = model.troughs();
    require(chosen.size() >= 3, "decay fit needs at least three extrema of one kind");
    double szz = 0.0, syz = 0.0;
    for (std::size_t i = 0; i + 1 < chosen.size(); ++i) {
        const double ratio = chosen[i + 1].amplitude / chosen[i].amplitude;
        if (!(ratio > 0.0)) throw ModelViolation("non-positive amplitude ratio between successive extrema");
        const double z = std::exp(-chosen[i].position);
        syz += (1.0 - ratio) * z;
        szz += z * z;
    }
    DecayFit fit;
    fit.ratios_used = static_cast<unsigned>(chosen.size() - 1);
    fit.kappa_prime = syz / szz;
    if (fit.kappa_prime < 0.0) {
        fit.kappa_prime = 0.0;
        fit.clipped = true;
    }
    fit.product_limit = decay_product(fit.kappa_prime, chosen.front().position);
    return fit;
}

namespace {

double weighted_sd(const std::vector<SubseqPoint>& pts, std::size_t from) {
    double sw = 0.0, swp = 0.0;
    for (std::size_t i = from; i < pts.size(); ++i) {
        const double w = 1.0 / (pts[i].err * pts[i].err + kDispersionWeightFloor * kDispersionWeightFloor);
        sw += w;
        swp += w * pts[i].p;
    }
    const double mean = swp / sw;
    double s = 0.0;
    for (std::size_t i = from; i < pts.size(); ++i) {
        const double w = 1.0 / (pts[i].err * pts[i].err + kDispersionWeightFloor * kDispersionWeightFloor);
        s += w * (pts[i].p - mean) * (pts[i].p - mean);
    }
    return std::sqrt(s / sw);
}

double plain_sd(const std::vector<double>& v) {
    double mean = 0.0;
    for (double a : v) mean += a;
    mean /= static_cast<double>(v.size());
    double s = 0.0;
    for (double a : v) s += (a - mean) * (a - mean);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

SubseqProbe subsequence_probe(const exact::PSeries& series, double phi, double tolerance) {
    require(phi >= 0.0 && phi < 1.0, "phi must lie in [0, 1)");
    require(tolerance > 0.0 && tolerance <= 0.5, "tolerance must lie in (0, 0.5]");
    std::uint64_t n_lo = 0, n_hi = 0;
    for (const auto& e : series.entries) {
        if (e.n < 1) continue;
        if (n_lo == 0 || e.n < n_lo) n_lo = e.n;
        n_hi = std::max(n_hi, e.n);
    }
    require(n_lo > 0 && static_cast<double>(n_hi) >= 1000.0 * static_cast<double>(n_lo),
            "series must span at least three decades of n");
    SubseqProbe probe;
    probe.phi = phi;
    probe.tolerance = tolerance;
    for (const auto& e : series.entries) {
        if (e.n < 1) continue;
        const double x = std::log(static_cast<double>(e.n));
        double d = std::abs((x - std::floor(x)) - phi);
        d = std::min(d, 1.0 - d);
        if (d <= tolerance) probe.points.push_back({e.n, e.value, e.err_radius});
    }
    std::sort(probe.points.begin(), probe.points.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
    require(probe.points.size() >= 3, "too few points selected");
    probe.dispersion = weighted_sd(probe.points, 0);
    std::vector<double> sel, full;
    for (const auto& p : probe.points) sel.push_back(p.p);
    probe.unweighted_dispersion = plain_sd(sel);
    const std::uint64_t a = probe.points.front().n, b = probe.points.back().n;
    for (const auto& e : series.entries)
        if (e.n >= a && e.n <= b) full.push_back(e.value);
    probe.full_dispersion = plain_sd(full);
    for (unsigned j = 0;; ++j) {
        const double cut = static_cast<double>(a) * std::exp(static_cast<double>(j));
        std::size_t from = 0;
        while (from < probe.points.size() && static_cast<double>(probe.points[from].n) < cut) ++from;
        if (probe.points.size() - from < 3) break;
        probe.tail_dispersion.push_back(weighted_sd(probe.points, from));
    }
    return probe;
}

}  // namespace roulette::waves
