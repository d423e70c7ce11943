#include <filesystem>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "roulette/common.hpp"
#include "roulette/io/atomic_file.hpp"
#include "roulette/io/series_io.hpp"

using namespace roulette;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / ("roulette_cli_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::size_t entries() const {
        return static_cast<std::size_t>(std::distance(std::filesystem::directory_iterator(path), {}));
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("pmf --n 4 prints the exact pmf") {
    const Result r = run({"pmf", "--n", "4"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\n4,0,1,9,") != std::string::npos);
    CHECK(r.out.find("\n4,1,16,27,") != std::string::npos);
    CHECK(r.out.find("\n4,2,8,27,") != std::string::npos);
    CHECK(r.err.empty());
}

TEST_CASE("pseries --exact-to 5 gives p_5 = 15/32") {
    const Result r = run({"pseries", "--exact-to", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\n5,,15,32,0.46875,0,exact,0\n") != std::string::npos);
    const auto series = io::parse_pseries(r.out);
    CHECK(series.entries.size() == 6);
}

TEST_CASE("simulate --n 1 --reps 10 gives point 1") {
    const Result r = run({"simulate", "--n", "1", "--reps", "10"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\n1,10,20240416,1,0\n") != std::string::npos);
}

TEST_CASE("exit codes") {
    const Result unknown = run({"pmf", "--n", "4", "--bogus"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("--bogus") != std::string::npos);
    CHECK(unknown.err.find("Usage:") != std::string::npos);
    CHECK(run({}).code == 1);
    CHECK(run({"nosuch"}).code == 1);
    CHECK(run({"pmf"}).code == 1);
    CHECK(run({"pmf", "--n", "1"}).code == 1);
    CHECK(run({"pmf", "--n", "700"}).code == 1);
    CHECK(run({"pmf", "--n", "4", "--format", "xml"}).code == 1);
    CHECK(run({"simulate", "--n", "5", "--threads", "0"}).code == 1);
    CHECK(run({"pseries"}).code == 1);
    CHECK(run({"pseries", "--mc-grid", "log:10"}).code == 1);
    CHECK(run({"clt", "--n", "100", "--reps", "100", "--format", "csv"}).code == 1);
    CHECK(run({"pmf", "--help"}).code == 0);
    // The Polya convexity condition fails at t = sqrt(y).
    const Result polya = run({"charfn", "--check", "polya", "--polya-y", "1", "--t-step", "0.01"});
    CHECK(polya.code == 2);
    CHECK(json::parse(polya.out)["passed"] == false);
    CHECK(run({"charfn", "--check", "polya", "--polya-y", "-1", "--t-step", "0.01"}).code == 0);
    CHECK(run({"waves", "--exact-to", "6"}).code == 2);
}

TEST_CASE("every subcommand's JSON round-trips through its schema") {
    TempDir dir;
    REQUIRE(run({"introdemo", "--m", "300", "--perm-m", "100", "--perms", "99", "--bootstrap", "20", "--sample-out",
                 dir / "pairs.csv", "--out", dir / "intro.json"})
                .code != 1);
    REQUIRE(run({"pseries", "--exact-to", "200", "--mode", "certified", "--mc-grid", "log:300:3000:4", "--reps", "400",
                 "--out", dir / "s.csv"})
                .code == 0);
    const std::vector<std::vector<std::string>> commands = {
        {"pmf", "--n", "6"},
        {"pmf", "--n", "30", "--mode", "certified"},
        {"pseries", "--exact-to", "12", "--mc-grid", "20,40", "--reps", "200"},
        {"simulate", "--n", "3,10", "--reps", "500"},
        {"clt", "--n", "200", "--reps", "500"},
        {"mcdiarmid", "--n", "100", "--reps", "500"},
        {"coupling", "--n", "50", "--reps", "500"},
        {"waves", "--in", dir / "s.csv", "--bootstrap", "4"},
        {"subseq", "--in", dir / "s.csv", "--phi", "0.5", "--tolerance", "0.1"},
        {"dcov", "--in", dir / "pairs.csv", "--perms", "99", "--bootstrap", "10"},
        {"dcov", "--in", dir / "pairs.csv", "--perms", "0", "--bootstrap", "0"},
        {"feq", "--grid-step", "0.5"},
        {"charfn", "--points", "100", "--t-step", "0.01", "--polya-y", "1", "--y", "1", "--w", "1"},
    };
    for (auto cmd : commands) {
        CAPTURE(cmd[0]);
        cmd.push_back("--format");
        cmd.push_back("json");
        const Result r = run(cmd);
        CHECK(r.code != 1);
        const json j = json::parse(r.out);
        CHECK(cli::reparse(j) == j);
    }
    const json intro = json::parse(io::read_text(dir / "intro.json"));
    CHECK(cli::reparse(intro) == intro);

    json broken = json::parse(run({"clt", "--n", "200", "--reps", "500"}).out);
    broken["result"].erase("variance_ratio");
    CHECK_THROWS_AS(cli::reparse(broken), ValidationError);
    CHECK_THROWS_AS(cli::reparse(json{{"schema", "roulette.other.v1"}}), ValidationError);
    CHECK_THROWS_AS(cli::reparse(json::array()), ValidationError);
}

TEST_CASE("outputs do not depend on the thread count") {
    const std::vector<std::vector<std::string>> commands = {
        {"simulate", "--n", "7,70", "--reps", "3000"},
        {"pseries", "--exact-to", "40", "--mode", "certified", "--mc-grid", "60,90", "--reps", "700"},
        {"introdemo", "--m", "400", "--perm-m", "120", "--perms", "99", "--bootstrap", "16"},
        {"clt", "--n", "300", "--reps", "900"},
        {"coupling", "--n", "40", "--reps", "700"},
    };
    for (auto cmd : commands) {
        CAPTURE(cmd[0]);
        auto one = cmd, four = cmd;
        one.insert(one.end(), {"--threads", "1"});
        four.insert(four.end(), {"--threads", "4"});
        const Result a = run(one), b = run(four);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("--out writes atomically and failures leave nothing behind") {
    TempDir dir;
    CHECK(run({"pmf", "--n", "5", "--out", dir / "p.csv"}).code == 0);
    CHECK(io::read_text(dir / "p.csv") == run({"pmf", "--n", "5"}).out);
    CHECK(dir.entries() == 1);

    CHECK(run({"pmf", "--n", "700", "--out", dir / "q.csv"}).code == 1);
    CHECK(run({"pseries", "--exact-to", "5", "--plot"}).code == 1);
    CHECK(run({"pseries", "--exact-to", "5", "--plot", "--out", dir / "x.svg"}).code == 1);
    CHECK(run({"pmf", "--n", "5", "--out", dir / "missing/p.csv"}).code == 1);
    CHECK(dir.entries() == 1);

    CHECK(run({"pseries", "--exact-to", "9", "--plot", "--out", dir / "s.csv"}).code == 0);
    CHECK(std::filesystem::exists(dir / "s.svg"));
    const std::string svg = io::read_text(dir / "s.svg");
    CHECK(svg.find("class=\"exact\"") != std::string::npos);
    CHECK(dir.entries() == 3);
}

TEST_CASE("series input accepts both formats") {
    TempDir dir;
    run({"pseries", "--exact-to", "200", "--mode", "certified", "--mc-grid", "log:300:3000:4", "--reps", "400",
         "--out", dir / "s.csv"});
    run({"pseries", "--exact-to", "200", "--mode", "certified", "--mc-grid", "log:300:3000:4", "--reps", "400",
         "--format", "json", "--out", dir / "s.json"});
    const Result a = run({"waves", "--in", dir / "s.csv", "--bootstrap", "4"});
    const Result b = run({"waves", "--in", dir / "s.json", "--bootstrap", "4"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const Result csv = run({"waves", "--in", dir / "s.csv", "--bootstrap", "4", "--format", "csv"});
    CHECK(csv.out.starts_with("# roulette waveplot csv v1\nlog_n,p,err,smoothed,c\n"));
    CHECK(run({"waves", "--in", dir / "s.csv", "--exact-to", "5"}).code == 1);
    CHECK(run({"waves", "--in", dir / "none.csv"}).code == 1);
}

TEST_CASE("feq and charfn reports") {
    const json feq = json::parse(run({"feq"}).out);
    CHECK(feq["passed"] == true);
    REQUIRE(feq["models"].size() == 4);
    CHECK(feq["models"][0]["grid"]["points"] == 101 * 101);
    CHECK(feq["models"][0]["max_residual"].get<double>() < 1e-10);
    CHECK(feq["models"][2]["witness_v"] == 2.0);

    const Result inv = run({"charfn", "--check", "inverse", "--y", "1", "--format", "csv"});
    CHECK(inv.code == 0);
    CHECK(inv.out.starts_with("# roulette grid csv v1\n"));
    CHECK(run({"charfn", "--check", "inverse", "--y", "1,2", "--format", "csv"}).code == 1);
    const json cauchy = json::parse(run({"charfn", "--check", "cauchy"}).out);
    CHECK(cauchy["passed"] == true);
    CHECK(cauchy["cauchy"].size() == 5);
    CHECK(cauchy["modulus"].is_null());
}
