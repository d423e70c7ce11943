#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "roulette/common.hpp"
#include "roulette/exact/recurrence.hpp"
#include "roulette/io/atomic_file.hpp"
#include "roulette/io/report_io.hpp"
#include "roulette/io/series_io.hpp"
#include "roulette/io/svg_plot.hpp"
#include "roulette/rng/philox.hpp"

using namespace roulette;
using namespace roulette::io;
using exact::PSeries;
using exact::Provenance;
using nlohmann::json;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t c = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++c;
    return c;
}

void check_same(const PSeries& a, const PSeries& b) {
    CHECK(a.flagged == b.flagged);
    CHECK(a.warnings == b.warnings);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        const auto &x = a.entries[i], &y = b.entries[i];
        CAPTURE(x.n);
        CHECK(x.n == y.n);
        CHECK(x.provenance == y.provenance);
        CHECK(x.exact == y.exact);
        CHECK(x.value == y.value);
        CHECK(x.err_radius == y.err_radius);
        CHECK(x.reps == y.reps);
    }
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("roulette_io_" + std::to_string(rng::Stream(std::random_device{}(), 0).next_u64()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::size_t entries() const {
        return static_cast<std::size_t>(std::distance(std::filesystem::directory_iterator(path), {}));
    }
};

PSeries three_exact() {
    PSeries s;
    for (unsigned n : {3u, 4u, 5u}) {
        const auto full = exact::p_recurrence(5);
        s.entries.push_back(full.entries[n]);
    }
    return s;
}

}  // namespace

TEST_CASE("seventeen-digit decimals") {
    CHECK(decimal17(mpq_class(1, 3)) == "0.33333333333333333");
    CHECK(decimal17(mpq_class(2, 3)) == "0.66666666666666667");
    CHECK(decimal17(mpq_class(15, 32)) == "0.46875");
    CHECK(decimal17(mpq_class(0)) == "0");
    CHECK(decimal17(0.1) == "0.10000000000000001");
    for (const double v : {0.1, 1.0 / 3.0, 6.02e23, -2.5e-300}) CHECK(std::stod(decimal17(v)) == v);
}

TEST_CASE("pmf CSV rows and round trip") {
    const PmfTable t = pmf_table(exact::survivor_pmf(4));
    const std::string csv = pmf_csv(t);
    CHECK(csv.starts_with("# roulette pmf csv v1\nn,k,numerator,denominator,value_decimal,err_radius,provenance,reps\n"));
    CHECK(csv.find("\n4,0,1,9,0.11111111111111111,0,exact,0\n") != std::string::npos);
    CHECK(csv.find("\n4,1,16,27,0.59259259259259259,0,exact,0\n") != std::string::npos);
    CHECK(csv.find("\n4,2,8,27,0.2962962962962963,0,exact,0\n") != std::string::npos);
    CHECK(parse_pmf_csv(csv) == t);
    for (unsigned n : {2u, 4u, 31u}) {
        const auto pmf = exact::survivor_pmf(n);
        CHECK(to_survivor_pmf(parse_pmf_csv(pmf_csv(pmf_table(pmf)))) == pmf);
        CHECK(to_survivor_pmf(pmf_from_json(pmf_json(pmf_table(pmf)))) == pmf);
    }
}

TEST_CASE("certified pmf tables carry no exact columns") {
    const PmfTable t = pmf_table(exact::certified_pmf(12, 64));
    const std::string csv = pmf_csv(t);
    CHECK(csv.find("\n12,0,,,") != std::string::npos);
    CHECK(parse_pmf_csv(csv) == t);
    const json j = pmf_json(t);
    CHECK(j["rows"][0]["numerator"].is_null());
    CHECK(pmf_from_json(json::parse(j.dump())) == t);
    CHECK_THROWS_AS(to_survivor_pmf(t), ValidationError);
}

TEST_CASE("pmf tables reject inconsistent content") {
    PmfTable t = pmf_table(exact::survivor_pmf(5));
    t.rows[1].exact = mpq_class(1, 7);
    CHECK_THROWS_AS(to_survivor_pmf(t), ValidationError);
    t = pmf_table(exact::survivor_pmf(5));
    t.rows.pop_back();
    CHECK_THROWS_AS(to_survivor_pmf(t), ValidationError);
}

TEST_CASE("series CSV and JSON round trip") {
    const PSeries mixed = waves::build_series(20, {30, 60}, 2000);
    const std::string csv = pseries_csv(mixed);
    CHECK(csv.find("\n5,,15,32,0.46875,0,exact,0\n") != std::string::npos);
    check_same(parse_pseries_csv(csv), mixed);
    check_same(pseries_from_json(json::parse(pseries_json(mixed).dump())), mixed);
    check_same(parse_pseries(csv), mixed);
    check_same(parse_pseries(pseries_json(mixed).dump(2)), mixed);

    const json j = pseries_json(mixed);
    CHECK(j["entries"][5]["numerator"] == "15");
    CHECK(j["entries"][5]["denominator"] == "32");
    CHECK(j["entries"][5]["value"] == 0.46875);
    CHECK(j["entries"].back()["provenance"] == "monte_carlo");
    CHECK(j["entries"].back()["reps"] == 2000);

    exact::RecurrenceOptions opt;
    opt.mode = exact::RecurrenceMode::certified;
    PSeries cert = exact::p_recurrence(40, opt);
    cert.flagged = true;
    cert.warnings = {"radius above threshold at n=40", "second"};
    check_same(parse_pseries_csv(pseries_csv(cert)), cert);
    check_same(pseries_from_json(pseries_json(cert)), cert);
}

TEST_CASE("series parsers reject malformed input") {
    const std::string good = pseries_csv(three_exact());
    CHECK_NOTHROW(parse_pseries_csv(good));
    CHECK_THROWS_AS(parse_pseries_csv(good.substr(good.find('\n') + 1)), ValidationError);
    CHECK_THROWS_AS(parse_pseries_csv("# roulette pseries csv v1\nn,value\n"), ValidationError);
    const std::string head = "# roulette pseries csv v1\n" + std::string(kRowColumns) + '\n';
    CHECK_THROWS_AS(parse_pseries_csv(head + "3,,3,4,0.75,0,exact\n"), ValidationError);
    CHECK_THROWS_AS(parse_pseries_csv(head + "3,,3,4,0.75,0,guess,0\n"), ValidationError);
    CHECK_THROWS_AS(parse_pseries_csv(head + "3,,3,0,0.75,0,exact,0\n"), ValidationError);
    CHECK_THROWS_AS(parse_pseries_csv(head + "30,,1,2,0.5,0.01,monte_carlo,10\n"), ValidationError);
    CHECK_THROWS_AS(parse_pseries_csv(head + "30,,,,abc,0.01,monte_carlo,10\n"), ValidationError);
    CHECK_THROWS_AS(parse_pseries_csv(head + "30,2,,,0.5,0.01,monte_carlo,10\n"), ValidationError);
    CHECK_THROWS_AS(parse_pseries("  "), ValidationError);
    CHECK_THROWS_AS(parse_pseries("{\"schema\": 3"), ValidationError);
    CHECK_THROWS_AS(pseries_from_json(json{{"schema", "other"}}), ValidationError);
    json bad = pseries_json(three_exact());
    bad["entries"][0]["value"] = 0.5;
    CHECK_THROWS_AS(pseries_from_json(bad), ValidationError);
}

TEST_CASE("Monte Carlo CSV") {
    const sim::McEstimate e{0.5, 0.25, 10, 7};
    CHECK(mc_csv({{1, e}}) == "# roulette mc csv v1\nn,reps,seed,point,stderr\n1,10,7,0.5,0.25\n");
}

TEST_CASE("report JSON round trips") {
    auto round_trip = [](const auto& value) {
        using T = std::decay_t<decltype(value)>;
        const json j = value;
        const T back = json::parse(j.dump()).get<T>();
        CHECK(json(back) == j);
    };
    round_trip(sim::clt_check(100, 200, 1));
    const std::vector<double> eps{5.0, 10.0};
    round_trip(sim::mcdiarmid_check(100, 200, eps, 1));
    round_trip(sim::coupling_check(50, 100, 1));
    round_trip(analytic::polya_check(1.0, analytic::uniform_grid(0.0, 20.0, 0.01)));
    round_trip(analytic::cauchy_cf_identity(1.0));
    round_trip(energy::CovEstimate{0.1, 0.02, 200});

    waves::WaveModel m;
    m.c = 0.48;
    m.extrema = {{2.0, 0.01, 1e-4, 0.02, 0.003, waves::ExtremumKind::peak},
                 {2.5, -0.01, 1e-4, 0.02, 0.003, waves::ExtremumKind::trough}};
    m.points = {{1.0, 0.5, 0.0, 0.49}, {1.1, 0.47, 0.001, 0.475}};
    round_trip(m);
    CHECK(json(m)["extrema"][1]["kind"] == "trough");

    const std::string csv = wave_plot_csv(m);
    CHECK(csv == "# roulette waveplot csv v1\nlog_n,p,err,smoothed,c\n1,0.5,0,0.48999999999999999,0.47999999999999998\n"
                 "1.1000000000000001,0.46999999999999997,0.001,0.47499999999999998,0.47999999999999998\n");
}

TEST_CASE("grid function CSV") {
    analytic::GridFunction g;
    g.grid = {-1.0, 0.0, 1.0};
    g.re = {0.1, 0.2, 0.1};
    g.im = {0.0, 0.0, 0.0};
    g.truncation_bound = 1e-12;
    const std::string csv = grid_function_csv(g);
    CHECK(csv.starts_with("# roulette grid csv v1\n# truncation_bound 9.9999999999999998e-13\n"));
    CHECK(count(csv, "\n") == 8);
}

TEST_CASE("paired sample CSV round trip") {
    rng::Stream s(11, 0);
    energy::PairedSample p;
    for (int i = 0; i < 100; ++i) {
        p.xs.push_back(s.next_double() * 1e3 - 500.0);
        p.ys.push_back(std::ldexp(s.next_double(), -40));
    }
    const auto back = parse_paired_csv(paired_csv(p));
    CHECK(back.xs == p.xs);
    CHECK(back.ys == p.ys);
    CHECK(parse_paired_csv("x,y\r\n1,2\r\n\n3,4").size() == 2);
    CHECK_THROWS_AS(parse_paired_csv("1,2\n"), ValidationError);
    CHECK_THROWS_AS(parse_paired_csv("x,y\n1,2,3\n"), ValidationError);
    CHECK_THROWS_AS(parse_paired_csv("x,y\n1,a\n"), ValidationError);
    CHECK_THROWS_AS(parse_paired_csv("x,y\n1,\n"), ValidationError);
}

TEST_CASE("atomic writes replace whole files and leave no temporaries") {
    TempDir dir;
    const auto target = dir.path / "out.csv";
    write_atomic(target, "first\n");
    CHECK(read_text(target) == "first\n");
    write_atomic(target, std::string(1 << 20, 'x'));
    CHECK(read_text(target).size() == (1u << 20));
    write_atomic(target, "");
    CHECK(read_text(target).empty());
    CHECK(dir.entries() == 1);
    CHECK(std::filesystem::status(target).permissions() != std::filesystem::perms::owner_read);

    CHECK_THROWS_AS(write_atomic(dir.path / "missing" / "out.csv", "x"), IoError);
    CHECK_THROWS_AS(write_atomic(dir.path, "x"), IoError);
    CHECK(dir.entries() == 1);
    CHECK_THROWS_AS(read_text(dir.path / "nope"), IoError);
}

TEST_CASE("SVG: exact points get markers and no error bars") {
    const std::string svg = render_svg(three_exact());
    CHECK(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    CHECK(count(svg, "class=\"exact\"") == 3);
    CHECK(count(svg, "class=\"errbar\"") == 0);
    CHECK(count(svg, "class=\"mc\"") == 0);
    CHECK(render_svg(three_exact()) == svg);
}

TEST_CASE("SVG: error bars only on Monte Carlo points") {
    exact::RecurrenceOptions opt;
    opt.mode = exact::RecurrenceMode::certified;
    PSeries s = exact::p_recurrence(12);
    const PSeries cert = exact::p_recurrence(15, opt);
    for (unsigned n = 13; n <= 15; ++n) s.entries.push_back(cert.entries[n]);
    const PSeries mc = waves::build_series(0, {20, 40, 80, 160}, 500);
    for (const auto& e : mc.entries) s.entries.push_back(e);
    const std::string svg = render_svg(s);
    CHECK(count(svg, "class=\"exact\"") == 10);  // n = 3..12
    CHECK(count(svg, "class=\"certified\"") == 3);
    CHECK(count(svg, "class=\"mc\"") == 4);
    CHECK(count(svg, "class=\"errbar\"") == 4);

    PlotOptions all;
    all.min_n = 1;
    CHECK(count(render_svg(s, all), "class=\"exact\"") == 12);
}

TEST_CASE("SVG: overlay, escaping and rejection") {
    waves::WaveModel m;
    m.c = 0.5;
    m.points = {{1.0, 0.5, 0.0, 0.5}, {1.5, 0.6, 0.0, 0.55}};
    m.extrema = {{1.5, 0.05, 0.0, 0.0, 0.0, waves::ExtremumKind::peak}};
    PlotOptions opt;
    opt.overlay = &m;
    opt.title = "a<b & c";
    const std::string svg = render_svg(three_exact(), opt);
    CHECK(count(svg, "class=\"smoothed\"") == 1);
    CHECK(count(svg, "class=\"c-level\"") == 1);
    CHECK(count(svg, "class=\"extremum\"") == 1);
    CHECK(svg.find("a&lt;b &amp; c") != std::string::npos);

    CHECK_THROWS_AS(render_svg(PSeries{}), ValidationError);
    CHECK_THROWS_AS(render_svg(exact::p_recurrence(2)), ValidationError);
    PSeries single;
    single.entries.push_back(three_exact().entries[0]);
    CHECK(count(render_svg(single), "class=\"exact\"") == 1);

    TempDir dir;
    emit_plot(three_exact(), dir.path / "p.svg");
    CHECK(read_text(dir.path / "p.svg") == render_svg(three_exact()));
    CHECK_THROWS_AS(emit_plot(PSeries{}, dir.path / "q.svg"), ValidationError);
    CHECK(dir.entries() == 1);
}
