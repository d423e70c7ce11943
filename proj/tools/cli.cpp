#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "roulette/analytic/charfn.hpp"
#include "roulette/analytic/functional_equation.hpp"
#include "roulette/common.hpp"
#include "roulette/energy/dcov.hpp"
#include "roulette/energy/intro_density.hpp"
#include "roulette/exact/recurrence.hpp"
#include "roulette/exact/survivor_pmf.hpp"
#include "roulette/io/atomic_file.hpp"
#include "roulette/io/report_io.hpp"
#include "roulette/io/series_io.hpp"
#include "roulette/io/svg_plot.hpp"
#include "roulette/rng/philox.hpp"
#include "roulette/sim/game.hpp"
#include "roulette/waves/analyzer.hpp"

namespace nlohmann {
template <class T>
struct adl_serializer<std::optional<T>> {
    static void to_json(json& j, const std::optional<T>& v) {
        if (v) j = *v;
        else j = nullptr;
    }
    static void from_json(const json& j, std::optional<T>& v) {
        if (j.is_null()) v.reset();
        else v = j.get<T>();
    }
};
}  // namespace nlohmann

namespace roulette::cli {

using nlohmann::json;

namespace {

/// One pass/fail line of a check report.
struct Check {
    std::string property;
    double value = 0.0;
    double threshold = 0.0;
    bool passed = false;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Check, property, value, threshold, passed)

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

bool all_passed(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

struct SimulateRow {
    std::uint64_t n = 0;
    sim::McEstimate estimate;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SimulateRow, n, estimate)

struct SimulateReport {
    std::string schema = "roulette.simulate.v1";
    std::uint64_t seed = 0;
    std::vector<SimulateRow> rows;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SimulateReport, schema, seed, rows)

struct CltReport {
    std::string schema = "roulette.clt.v1";
    std::string centering;
    sim::CltResult result;
    std::vector<Check> checks;
    bool passed = false;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CltReport, schema, centering, result, checks, passed)

struct McDiarmidReport {
    std::string schema = "roulette.mcdiarmid.v1";
    std::vector<sim::TailTable> tables;
    std::vector<Check> checks;
    bool passed = false;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(McDiarmidReport, schema, tables, checks, passed)

struct CouplingOut {
    std::string schema = "roulette.coupling.v1";
    sim::CouplingReport report;
    std::vector<Check> checks;
    bool passed = false;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CouplingOut, schema, report, checks, passed)

struct WavesReport {
    std::string schema = "roulette.waves.v1";
    waves::WaveModel model;
    std::optional<waves::DecayFit> decay;
    std::string decay_note;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WavesReport, schema, model, decay, decay_note)

struct SubseqReport {
    std::string schema = "roulette.subseq.v1";
    waves::SubseqProbe probe;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SubseqReport, schema, probe)

struct DcovReport {
    std::string schema = "roulette.dcov.v1";
    std::uint64_t m = 0;
    energy::DcorResult dcor;
    std::optional<energy::PermutationResult> permutation;
    std::optional<energy::CovEstimate> cov;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DcovReport, schema, m, dcor, permutation, cov)

struct IntroReport {
    std::string schema = "roulette.introdemo.v1";
    std::uint64_t m = 0;
    std::uint64_t proposals = 0;
    double acceptance_rate = 0.0;
    energy::CovEstimate cov;
    std::uint64_t perm_m = 0;
    energy::DcorResult dcor;
    energy::PermutationResult permutation;
    std::vector<Check> checks;
    bool passed = false;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(IntroReport, schema, m, proposals, acceptance_rate, cov, perm_m, dcor,
                                   permutation, checks, passed)

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    std::uint64_t points = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GridSpec, lo, hi, step, points)

struct FeqModelReport {
    std::string model;
    bool expect_solution = false;
    GridSpec grid;
    double max_residual = 0.0;
    double argmax_u = 0.0;
    double argmax_v = 0.0;
    double witness_u = 0.0;
    double witness_v = 0.0;
    analytic::FeqSides witness;
    std::vector<Check> checks;
    bool passed = false;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FeqModelReport, model, expect_solution, grid, max_residual, argmax_u, argmax_v,
                                   witness_u, witness_v, witness, checks, passed)

struct FeqReport {
    std::string schema = "roulette.feq.v1";
    std::vector<FeqModelReport> models;
    bool passed = false;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FeqReport, schema, models, passed)

struct ModulusReport {
    std::uint64_t points = 0;
    std::uint64_t seed = 0;
    double max_residual = 0.0;
    double at_t = 0.0;
    double at_s = 0.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ModulusReport, points, seed, max_residual, at_t, at_s)

struct InverseReport {
    double y = 0.0;
    GridSpec grid;
    double min_value = 0.0;
    double argmin = 0.0;
    double max_imag = 0.0;
    double truncation_bound = 0.0;
    double discretization_bound = 0.0;
    double rounding_bound = 0.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(InverseReport, y, grid, min_value, argmin, max_imag, truncation_bound,
                                   discretization_bound, rounding_bound)

struct CharfnReport {
    std::string schema = "roulette.charfn.v1";
    std::optional<ModulusReport> modulus;
    std::vector<analytic::PolyaReport> polya;
    std::vector<InverseReport> inverse;
    std::vector<analytic::CauchyIdentity> cauchy;
    std::vector<Check> checks;
    bool passed = false;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CharfnReport, schema, modulus, polya, inverse, cauchy, checks, passed)

template <class T>
json round_trip(const json& j) {
    return json(j.get<T>());
}

/// Raised after the report has been written when a check in it failed.
struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Options

struct Common {
    std::uint64_t seed = sim::kDefaultSeed;
    unsigned threads = 1;
    std::string format;
    std::string out;
    bool plot = false;
};

struct SeriesSource {
    std::string in;
    unsigned exact_to = 0;
    std::string mc_grid;
    std::uint64_t reps = 10000;
    std::string mode = "exact";
    unsigned precision_bits = 128;
    unsigned exact_ceiling = exact::kDefaultExactCeiling;
    double window_width = 3.0;
    bool no_window = false;
};

void add_common(CLI::App* app, Common& c, bool with_seed, bool with_plot) {
    if (with_seed) app->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
    app->add_option("--threads", c.threads, "worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
    app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--out", c.out, "output file (written atomically); stdout when absent");
    if (with_plot) app->add_flag("--plot", c.plot, "also write an SVG chart next to --out");
}

void add_series_source(CLI::App* app, SeriesSource& s, bool with_input) {
    if (with_input) app->add_option("--in", s.in, "read the p_n series (CSV or JSON) instead of computing it");
    app->add_option("--exact-to", s.exact_to, "exact (or certified) p_n for n = 0..N");
    app->add_option("--mc-grid", s.mc_grid, "Monte Carlo n values: a,b,c or log:N0:N1:PER");
    app->add_option("--reps", s.reps, "Monte Carlo repetitions per grid point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--mode", s.mode, "recurrence arithmetic")
        ->check(CLI::IsMember({"exact", "certified"}))
        ->capture_default_str();
    app->add_option("--precision-bits", s.precision_bits, "MPFR guard bits in certified mode")
        ->check(CLI::Range(64u, 1u << 20))
        ->capture_default_str();
    app->add_option("--exact-ceiling", s.exact_ceiling, "largest n for exact integer pmfs")->capture_default_str();
    app->add_option("--window-width", s.window_width, "truncation window half-width in sqrt(n ln n) units")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_flag("--no-window", s.no_window, "sum the full pmf in certified mode");
}

std::vector<std::uint64_t> parse_grid(const std::string& spec) {
    if (spec.empty()) return {};
    if (spec.starts_with("log:")) {
        std::vector<std::string> f;
        std::stringstream ss(spec.substr(4));
        for (std::string part; std::getline(ss, part, ':');) f.push_back(part);
        require(f.size() == 3, "log grid is log:N0:N1:PER");
        try {
            return waves::log_grid(std::stoull(f[0]), std::stoull(f[1]), std::stod(f[2]));
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const ValidationError*>(&e)) throw;
            throw ValidationError("malformed log grid '" + spec + "'");
        }
    }
    std::vector<std::uint64_t> out;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ',');) {
        require(!part.empty() && part.find_first_not_of("0123456789") == std::string::npos,
                "malformed grid value '" + part + "'");
        out.push_back(std::stoull(part));
    }
    return out;
}

exact::PSeries load_series(const SeriesSource& s, const Common& c) {
    if (!s.in.empty()) {
        require(s.exact_to == 0 && s.mc_grid.empty(), "--in excludes --exact-to and --mc-grid");
        return io::parse_pseries(io::read_text(s.in));
    }
    const auto grid = parse_grid(s.mc_grid);
    require(s.exact_to > 0 || !grid.empty(), "nothing to compute: give --exact-to and/or --mc-grid");
    waves::SeriesOptions opt;
    opt.threads = c.threads;
    opt.recurrence.mode = s.mode == "certified" ? exact::RecurrenceMode::certified : exact::RecurrenceMode::exact;
    opt.recurrence.precision_bits = s.precision_bits;
    opt.recurrence.exact_ceiling = s.exact_ceiling;
    opt.recurrence.window.enabled = !s.no_window;
    opt.recurrence.window.width = s.window_width;
    opt.recurrence.threads = c.threads;
    return waves::build_series(s.exact_to, grid, s.reps, c.seed, opt);
}

std::string format_of(const Common& c, const char* fallback) { return c.format.empty() ? fallback : c.format; }

void require_json(const Common& c, const char* command) {
    require(format_of(c, "json") == "json", std::string(command) + " emits JSON only");
}

std::filesystem::path plot_path(const Common& c) {
    require(!c.out.empty(), "--plot needs --out; the chart is written beside it");
    std::filesystem::path p(c.out);
    require(p.extension() != ".svg", "--out must not end in .svg when --plot is given");
    return p.replace_extension(".svg");
}

class Emitter {
public:
    Emitter(const Common& c, std::ostream& out) : common_(c), out_(out) {}
    void text(const std::string& content) {
        if (common_.out.empty()) out_ << content;
        else io::write_atomic(common_.out, content);
    }
    void json_doc(const json& j) { text(j.dump(2) + '\n'); }

private:
    const Common& common_;
    std::ostream& out_;
};

// ---------------------------------------------------------------------------
// Commands

struct PmfArgs {
    unsigned n = 0;
    std::string mode = "exact";
    unsigned precision_bits = 128;
    unsigned exact_ceiling = exact::kDefaultExactCeiling;
};

void cmd_pmf(const PmfArgs& a, const Common& c, Emitter& emit) {
    require(a.n >= 2, "--n must be at least 2");
    const io::PmfTable t = a.mode == "exact" ? io::pmf_table(exact::survivor_pmf(a.n, a.exact_ceiling))
                                             : io::pmf_table(exact::certified_pmf(a.n, a.precision_bits));
    if (format_of(c, "csv") == "csv") emit.text(io::pmf_csv(t));
    else emit.json_doc(io::pmf_json(t));
}

void cmd_pseries(const SeriesSource& s, const Common& c, Emitter& emit) {
    const auto svg = c.plot ? std::optional(plot_path(c)) : std::nullopt;
    const exact::PSeries series = load_series(s, c);
    if (format_of(c, "csv") == "csv") emit.text(io::pseries_csv(series));
    else emit.json_doc(io::pseries_json(series));
    if (svg) io::emit_plot(series, *svg);
    if (series.flagged) throw CheckFailed("certified radius above threshold; see warnings in the output");
}

struct SimulateArgs {
    std::vector<std::uint64_t> n;
    std::uint64_t reps = 10000;
};

void cmd_simulate(const SimulateArgs& a, const Common& c, Emitter& emit) {
    SimulateReport r;
    r.seed = c.seed;
    std::vector<std::pair<std::uint64_t, sim::McEstimate>> rows;
    for (const auto n : a.n) {
        const auto e = sim::estimate_p(n, a.reps, c.seed, c.threads);
        rows.emplace_back(n, e);
        r.rows.push_back({n, e});
    }
    if (format_of(c, "csv") == "csv") emit.text(io::mc_csv(rows));
    else emit.json_doc(r);
}

struct CltArgs {
    std::uint64_t n = 10000;
    std::uint64_t reps = 10000;
    std::string centering = "exact";
};

void cmd_clt(const CltArgs& a, const Common& c, Emitter& emit) {
    require_json(c, "clt");
    CltReport r;
    r.centering = a.centering;
    r.result = sim::clt_check(a.n, a.reps, c.seed, c.threads,
                              a.centering == "exact" ? sim::CenteringPolicy::exact_mean
                                                     : sim::CenteringPolicy::limit_mean);
    const double vr = r.result.variance_ratio;
    r.checks.push_back({"abs(variance_ratio - 1)", std::fabs(vr - 1.0), 0.05, std::fabs(vr - 1.0) <= 0.05});
    const double lim = 4.0 / std::sqrt(static_cast<double>(a.reps));
    r.checks.push_back({"abs(standardized_mean)", std::fabs(r.result.standardized_mean), lim,
                        std::fabs(r.result.standardized_mean) <= lim});
    r.passed = all_passed(r.checks);
    emit.json_doc(r);
    if (!r.passed) throw CheckFailed("clt check failed");
}

struct McDiarmidArgs {
    std::vector<std::uint64_t> n{100, 1000};
    std::uint64_t reps = 100000;
    std::vector<double> eps_sqrt_n{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
};

void cmd_mcdiarmid(const McDiarmidArgs& a, const Common& c, Emitter& emit) {
    require_json(c, "mcdiarmid");
    McDiarmidReport r;
    for (const auto n : a.n) {
        std::vector<double> eps;
        for (const double k : a.eps_sqrt_n) eps.push_back(k * std::sqrt(static_cast<double>(n)));
        r.tables.push_back(sim::mcdiarmid_check(n, a.reps, eps, c.seed, c.threads));
        std::size_t flagged = 0;
        for (const auto& row : r.tables.back().rows) flagged += row.flagged;
        r.checks.push_back({"flagged rows at n=" + std::to_string(n), double(flagged), 0.0, flagged == 0});
    }
    r.passed = all_passed(r.checks);
    emit.json_doc(r);
    if (!r.passed) throw CheckFailed("empirical tail exceeds the McDiarmid bound");
}

struct CouplingArgs {
    std::uint64_t n = 1000;
    std::uint64_t reps = 100000;
};

void cmd_coupling(const CouplingArgs& a, const Common& c, Emitter& emit) {
    require_json(c, "coupling");
    CouplingOut r;
    r.report = sim::coupling_check(a.n, a.reps, c.seed, c.threads);
    const auto& rep = r.report;
    r.checks.push_back({"rounds with |xi - xi'| > eta", double(rep.violations), 0.0, rep.violations == 0});
    const double eta_z = std::fabs(rep.eta.point - 1.0) / rep.eta.std_error;
    r.checks.push_back({"|mean eta - 1| / stderr", eta_z, 4.0, eta_z <= 4.0});
    const double urn_z = std::fabs(rep.urn_survivors.point - rep.urn_survivors_exact) / rep.urn_survivors.std_error;
    r.checks.push_back({"|mean xi' - n(1-1/n)^n| / stderr", urn_z, 4.0, urn_z <= 4.0});
    r.passed = all_passed(r.checks);
    emit.json_doc(r);
    if (!r.passed) throw CheckFailed("coupling check failed");
}

struct WavesArgs {
    unsigned window_divisor = 8;
    unsigned bootstrap = 64;
};

void cmd_waves(const WavesArgs& a, const SeriesSource& s, const Common& c, Emitter& emit) {
    const auto svg = c.plot ? std::optional(plot_path(c)) : std::nullopt;
    const exact::PSeries series = load_series(s, c);
    WavesReport r;
    r.model = waves::detect_waves(series, a.window_divisor, {a.bootstrap, c.seed, c.threads});
    try {
        r.decay = waves::fit_wave_decay(r.model);
    } catch (const std::exception& e) {
        r.decay_note = e.what();
    }
    if (format_of(c, "json") == "csv") emit.text(io::wave_plot_csv(r.model));
    else emit.json_doc(r);
    if (svg) {
        io::PlotOptions opt;
        opt.overlay = &r.model;
        io::emit_plot(series, *svg, opt);
    }
}

struct SubseqArgs {
    double phi = 0.0;
    double tolerance = 0.05;
};

void cmd_subseq(const SubseqArgs& a, const SeriesSource& s, const Common& c, Emitter& emit) {
    require_json(c, "subseq");
    SubseqReport r;
    r.probe = waves::subsequence_probe(load_series(s, c), a.phi, a.tolerance);
    emit.json_doc(r);
}

struct DcovArgs {
    std::string in;
    std::uint64_t perms = 999;
    unsigned bootstrap = 200;
};

void cmd_dcov(const DcovArgs& a, const Common& c, Emitter& emit) {
    require_json(c, "dcov");
    const energy::PairedSample s = io::parse_paired_csv(io::read_text(a.in));
    s.validate(2);
    DcovReport r;
    r.m = s.size();
    r.dcor = energy::dcor(s, c.threads);
    if (a.perms > 0) r.permutation = energy::perm_test_dcor(s, a.perms, c.seed, c.threads);
    if (a.bootstrap > 0) r.cov = energy::cov_sym_abs_diff_bootstrap(s, a.bootstrap, c.seed, c.threads);
    emit.json_doc(r);
}

struct IntroArgs {
    std::uint64_t m = 10000;
    std::uint64_t perm_m = 2000;
    std::uint64_t perms = 999;
    unsigned bootstrap = 200;
    std::string sample_out;
};

void cmd_introdemo(const IntroArgs& a, const Common& c, Emitter& emit) {
    require_json(c, "introdemo");
    require(a.perm_m >= 2 && a.perm_m <= a.m, "--perm-m must lie in [2, m]");
    const energy::IntroSample sample = energy::sample_intro_density(a.m, c.seed);
    IntroReport r;
    r.m = a.m;
    r.proposals = sample.proposals;
    r.acceptance_rate = sample.acceptance_rate();
    r.cov = energy::cov_sym_abs_diff_bootstrap(sample.sample, a.bootstrap, c.seed, c.threads);
    energy::PairedSample head;
    head.xs.assign(sample.sample.xs.begin(), sample.sample.xs.begin() + static_cast<std::ptrdiff_t>(a.perm_m));
    head.ys.assign(sample.sample.ys.begin(), sample.sample.ys.begin() + static_cast<std::ptrdiff_t>(a.perm_m));
    r.perm_m = a.perm_m;
    r.dcor = energy::dcor(head, c.threads);
    r.permutation = energy::perm_test_dcor(head, a.perms, c.seed, c.threads);
    const double bound = 4.0 * r.cov.bootstrap_stderr;
    r.checks.push_back({"|cov(|X-X'|, |Y-Y'|)|", std::fabs(r.cov.value), bound, std::fabs(r.cov.value) <= bound});
    r.checks.push_back({"permutation p-value", r.permutation.p_value, 0.01, r.permutation.p_value < 0.01});
    r.passed = all_passed(r.checks);
    if (!a.sample_out.empty()) io::write_atomic(a.sample_out, io::paired_csv(sample.sample));
    emit.json_doc(r);
    if (!r.passed) throw CheckFailed("introdemo check failed");
}

struct FeqArgs {
    std::vector<std::string> models{"exponential", "normal_half_var", "laplace", "half_normal"};
    double lo = -5.0;
    double hi = 5.0;
    double step = 0.1;
};

void cmd_feq(const FeqArgs& a, const Common& c, Emitter& emit) {
    require_json(c, "feq");
    const auto grid = analytic::uniform_grid(a.lo, a.hi, a.step);
    FeqReport rep;
    for (const auto& name : a.models) {
        const analytic::DensityModel m = analytic::density_model(analytic::parse_model(name));
        FeqModelReport r;
        r.model = name;
        r.expect_solution = m.id == analytic::ModelId::exponential || m.id == analytic::ModelId::normal_half_var;
        r.grid = {a.lo, a.hi, a.step, grid.size() * grid.size()};
        for (const double u : grid)
            for (const double v : grid) {
                const double res = analytic::feq_residual(m, u, v);
                if (res > r.max_residual) r.max_residual = res, r.argmax_u = u, r.argmax_v = v;
            }
        if (r.expect_solution) {
            r.witness_u = r.argmax_u, r.witness_v = r.argmax_v;
            r.witness = analytic::feq_sides(m, r.witness_u, r.witness_v);
            r.checks.push_back({"max residual on grid", r.max_residual, 1e-10, r.max_residual < 1e-10});
        } else if (m.id == analytic::ModelId::laplace) {
            r.witness_u = 0.0, r.witness_v = 2.0;
            r.witness = analytic::feq_sides(m, 0.0, 2.0);
            const double res = std::fabs(r.witness.lhs - r.witness.rhs);
            r.checks.push_back({"residual at (0, 2)", res, 1e-2, res > 1e-2});
        } else {
            r.witness_u = 0.5, r.witness_v = 1.0;
            r.witness = analytic::half_normal_violation(0.5, 1.0);
            r.checks.push_back({"lhs at (0.5, 1)", r.witness.lhs, 0.0, r.witness.lhs == 0.0});
            r.checks.push_back({"rhs at (0.5, 1)", r.witness.rhs, 0.0, r.witness.rhs > 0.0});
        }
        r.passed = all_passed(r.checks);
        rep.models.push_back(std::move(r));
    }
    rep.passed = std::all_of(rep.models.begin(), rep.models.end(), [](const auto& r) { return r.passed; });
    emit.json_doc(rep);
    if (!rep.passed) throw CheckFailed("functional-equation check failed");
}

struct CharfnArgs {
    std::string check = "all";
    std::uint64_t points = 10000;
    std::vector<double> polya_y{0.1, 1.0, 10.0};
    std::vector<double> inverse_y{-1.0, 0.1, 1.0, 10.0};
    std::vector<double> w{0.0, 1.0, -1.0, 2.0, -2.0};
    double t_max = 20.0;
    double t_step = 1e-3;
    double x_lo = -20.0;
    double x_hi = 20.0;
    double x_step = 0.05;
};

void cmd_charfn(const CharfnArgs& a, const Common& c, Emitter& emit) {
    const bool all = a.check == "all";
    const std::string fmt = format_of(c, "json");
    CharfnReport r;
    std::optional<analytic::GridFunction> single_grid;
    if (all || a.check == "modulus") {
        require(a.points >= 1, "--points must be positive");
        ModulusReport m{a.points, c.seed, 0.0, 0.0, 0.0};
        rng::Stream s(c.seed, 0, rng::Domain::generic);
        for (std::uint64_t i = 0; i < a.points; ++i) {
            const double t = 20.0 * s.next_double() - 10.0, u = 200.0 * s.next_double() - 100.0;
            const double res = analytic::cf_modulus_identity(t, u);
            if (res > m.max_residual) m.max_residual = res, m.at_t = t, m.at_s = u;
        }
        r.checks.push_back({"cf modulus identity", m.max_residual, 1e-14, m.max_residual < 1e-14});
        r.modulus = m;
    }
    if (all || a.check == "polya") {
        const auto grid = analytic::uniform_grid(0.0, a.t_max, a.t_step);
        for (const double y : a.polya_y) {
            r.polya.push_back(analytic::polya_check(y, grid));
            const auto& p = r.polya.back();
            r.checks.push_back({"Polya conditions at y=" + short_num(y), double(p.violations.size()), 0.0,
                                p.passed()});
        }
    }
    if (all || a.check == "inverse") {
        const auto xs = analytic::uniform_grid(a.x_lo, a.x_hi, a.x_step);
        for (const double y : a.inverse_y) {
            const auto inv = analytic::inverse_fourier_nonneg(y, xs);
            r.inverse.push_back({y, {a.x_lo, a.x_hi, a.x_step, xs.size()}, inv.min_value, inv.argmin, inv.max_imag,
                                 inv.g.truncation_bound, inv.g.discretization_bound, inv.g.rounding_bound});
            r.checks.push_back({"min g at y=" + short_num(y), inv.min_value, -1e-8, inv.min_value >= -1e-8});
            if (a.inverse_y.size() == 1) single_grid = inv.g;
        }
    }
    if (all || a.check == "cauchy") {
        for (const double w : a.w) {
            r.cauchy.push_back(analytic::cauchy_cf_identity(w));
            r.checks.push_back(
                {"Cauchy identity at w=" + short_num(w), r.cauchy.back().error, 1e-6, r.cauchy.back().error <= 1e-6});
        }
    }
    r.passed = all_passed(r.checks);
    if (fmt == "csv") {
        require(a.check == "inverse" && single_grid, "CSV output needs --check inverse with a single --y");
        emit.text(io::grid_function_csv(*single_grid));
    } else {
        emit.json_doc(r);
    }
    if (!r.passed) throw CheckFailed("characteristic-function check failed");
}

}  // namespace

json reparse(const json& report) {
    require(report.is_object() && report.contains("schema") && report["schema"].is_string(),
            "report has no schema field");
    const std::string schema = report["schema"].get<std::string>();
    try {
        if (schema == io::kPmfJsonSchema) return io::pmf_json(io::pmf_from_json(report));
        if (schema == io::kSeriesJsonSchema) return io::pseries_json(io::pseries_from_json(report));
        const std::map<std::string, std::function<json(const json&)>, std::less<>> table{
            {"roulette.simulate.v1", round_trip<SimulateReport>},
            {"roulette.clt.v1", round_trip<CltReport>},
            {"roulette.mcdiarmid.v1", round_trip<McDiarmidReport>},
            {"roulette.coupling.v1", round_trip<CouplingOut>},
            {"roulette.waves.v1", round_trip<WavesReport>},
            {"roulette.subseq.v1", round_trip<SubseqReport>},
            {"roulette.dcov.v1", round_trip<DcovReport>},
            {"roulette.introdemo.v1", round_trip<IntroReport>},
            {"roulette.feq.v1", round_trip<FeqReport>},
            {"roulette.charfn.v1", round_trip<CharfnReport>},
        };
        const auto it = table.find(schema);
        require(it != table.end(), "unknown schema '" + schema + "'");
        return it->second(report);
    } catch (const json::exception& e) {
        throw ValidationError("report does not follow schema '" + schema + "': " + e.what());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hungarian roulette: exact and simulated survivor probabilities, wave analysis, energy statistics "
                 "and analytic checks"};
    app.name("roulette");
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    Common common;
    SeriesSource source;

    PmfArgs pmf;
    auto* c_pmf = app.add_subcommand("pmf", "exact distribution of first-round survivors");
    c_pmf->add_option("--n", pmf.n, "players")->required();
    c_pmf->add_option("--mode", pmf.mode)->check(CLI::IsMember({"exact", "certified"}))->capture_default_str();
    c_pmf->add_option("--precision-bits", pmf.precision_bits, "guard bits for certified mode")
        ->check(CLI::Range(64u, 1u << 20))
        ->capture_default_str();
    c_pmf->add_option("--exact-ceiling", pmf.exact_ceiling)->capture_default_str();
    add_common(c_pmf, common, false, false);

    auto* c_pseries = app.add_subcommand("pseries", "p_n from the recurrence and/or simulation");
    add_series_source(c_pseries, source, false);
    add_common(c_pseries, common, true, true);

    SimulateArgs simulate;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo estimate of p_n");
    c_sim->add_option("--n", simulate.n, "players (comma-separated list allowed)")->required()->delimiter(',');
    c_sim->add_option("--reps", simulate.reps)->check(CLI::PositiveNumber)->capture_default_str();
    add_common(c_sim, common, true, false);

    CltArgs clt;
    auto* c_clt = app.add_subcommand("clt", "normal approximation of first-round survivors");
    c_clt->add_option("--n", clt.n)->capture_default_str();
    c_clt->add_option("--reps", clt.reps)->check(CLI::PositiveNumber)->capture_default_str();
    c_clt->add_option("--centering", clt.centering)->check(CLI::IsMember({"exact", "limit"}))->capture_default_str();
    add_common(c_clt, common, true, false);

    McDiarmidArgs mcd;
    auto* c_mcd = app.add_subcommand("mcdiarmid", "empirical tails against the McDiarmid bound");
    c_mcd->add_option("--n", mcd.n)->delimiter(',')->capture_default_str();
    c_mcd->add_option("--reps", mcd.reps)->check(CLI::PositiveNumber)->capture_default_str();
    c_mcd->add_option("--eps", mcd.eps_sqrt_n, "deviations in units of sqrt(n)")->delimiter(',')->capture_default_str();
    add_common(c_mcd, common, true, false);

    CouplingArgs coupling;
    auto* c_cpl = app.add_subcommand("coupling", "urn coupling inequality and E(eta) = 1");
    c_cpl->add_option("--n", coupling.n)->capture_default_str();
    c_cpl->add_option("--reps", coupling.reps)->check(CLI::PositiveNumber)->capture_default_str();
    add_common(c_cpl, common, true, false);

    WavesArgs wv;
    auto* c_waves = app.add_subcommand("waves", "extrema, period and decay of p_n against ln n");
    add_series_source(c_waves, source, true);
    c_waves->add_option("--window-divisor", wv.window_divisor, "smoothing width = period / divisor")
        ->check(CLI::Range(1u, 1000u))
        ->capture_default_str();
    c_waves->add_option("--bootstrap", wv.bootstrap, "parametric bootstrap replicas")->capture_default_str();
    add_common(c_waves, common, true, true);

    SubseqArgs sub;
    auto* c_sub = app.add_subcommand("subseq", "dispersion of p_n along n ~ e^(k + phi)");
    add_series_source(c_sub, source, true);
    c_sub->add_option("--phi", sub.phi)->capture_default_str();
    c_sub->add_option("--tolerance", sub.tolerance)->capture_default_str();
    add_common(c_sub, common, true, false);

    DcovArgs dc;
    auto* c_dcov = app.add_subcommand("dcov", "distance covariance, correlation and permutation test");
    c_dcov->add_option("--in", dc.in, "paired sample CSV (x,y)")->required();
    c_dcov->add_option("--perms", dc.perms, "permutations; 0 skips the test")->capture_default_str();
    c_dcov->add_option("--bootstrap", dc.bootstrap, "replicas for cov(|X-X'|,|Y-Y'|); 0 skips it")
        ->capture_default_str();
    add_common(c_dcov, common, true, false);

    IntroArgs intro;
    auto* c_intro = app.add_subcommand("introdemo", "dependent pair with cov(|X-X'|,|Y-Y'|) = 0");
    c_intro->add_option("--m", intro.m, "sample size")->check(CLI::Range(2ull, 1ull << 24))->capture_default_str();
    c_intro->add_option("--perm-m", intro.perm_m, "leading pairs used by the permutation test")
        ->capture_default_str();
    c_intro->add_option("--perms", intro.perms)->capture_default_str();
    c_intro->add_option("--bootstrap", intro.bootstrap)->capture_default_str();
    c_intro->add_option("--sample-out", intro.sample_out, "also write the sample as CSV");
    add_common(c_intro, common, true, false);

    FeqArgs feq;
    auto* c_feq = app.add_subcommand("feq", "residuals of the difference-density functional equation");
    c_feq->add_option("--model", feq.models)->delimiter(',')->capture_default_str();
    c_feq->add_option("--grid-lo", feq.lo)->capture_default_str();
    c_feq->add_option("--grid-hi", feq.hi)->capture_default_str();
    c_feq->add_option("--grid-step", feq.step)->check(CLI::PositiveNumber)->capture_default_str();
    add_common(c_feq, common, false, false);

    CharfnArgs cf;
    auto* c_cf = app.add_subcommand("charfn", "characteristic-function identities and Polya checks");
    c_cf->add_option("--check", cf.check)
        ->check(CLI::IsMember({"all", "modulus", "polya", "inverse", "cauchy"}))
        ->capture_default_str();
    c_cf->add_option("--points", cf.points, "random points for the modulus identity")->capture_default_str();
    c_cf->add_option("--polya-y", cf.polya_y)->delimiter(',')->capture_default_str();
    c_cf->add_option("--y", cf.inverse_y, "y values for the inverse transform")->delimiter(',')->capture_default_str();
    c_cf->add_option("--w", cf.w)->delimiter(',')->capture_default_str();
    c_cf->add_option("--t-max", cf.t_max)->check(CLI::PositiveNumber)->capture_default_str();
    c_cf->add_option("--t-step", cf.t_step)->check(CLI::PositiveNumber)->capture_default_str();
    c_cf->add_option("--x-lo", cf.x_lo)->capture_default_str();
    c_cf->add_option("--x-hi", cf.x_hi)->capture_default_str();
    c_cf->add_option("--x-step", cf.x_step)->check(CLI::PositiveNumber)->capture_default_str();
    add_common(c_cf, common, true, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
    }

    Emitter emit(common, out);
    try {
        if (c_pmf->parsed()) cmd_pmf(pmf, common, emit);
        else if (c_pseries->parsed()) cmd_pseries(source, common, emit);
        else if (c_sim->parsed()) cmd_simulate(simulate, common, emit);
        else if (c_clt->parsed()) cmd_clt(clt, common, emit);
        else if (c_mcd->parsed()) cmd_mcdiarmid(mcd, common, emit);
        else if (c_cpl->parsed()) cmd_coupling(coupling, common, emit);
        else if (c_waves->parsed()) cmd_waves(wv, source, common, emit);
        else if (c_sub->parsed()) cmd_subseq(sub, source, common, emit);
        else if (c_dcov->parsed()) cmd_dcov(dc, common, emit);
        else if (c_intro->parsed()) cmd_introdemo(intro, common, emit);
        else if (c_feq->parsed()) cmd_feq(feq, common, emit);
        else if (c_cf->parsed()) cmd_charfn(cf, common, emit);
    } catch (const CheckFailed& e) {
        err << "check failed: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const InvariantViolation& e) {
        err << "invariant violated: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const waves::InsufficientOscillation& e) {
        err << "check failed: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const waves::ModelViolation& e) {
        err << "check failed: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitOk;
}

}  // namespace roulette::cli
