#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "rqmc/io.hpp"
#include "rqmc/netgen.hpp"
#include "support/testutil.hpp"

#ifndef RQMC_CLI_PATH
#error "RQMC_CLI_PATH must point at the CLI binary"
#endif

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "rqmc_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    fs::path out = work_dir() / ("stdout." + std::to_string(counter));
    fs::path err = work_dir() / ("stderr." + std::to_string(counter));
    ++counter;
    std::string cmd = env_prefix + RQMC_CLI_PATH + " " + args + " > " + out.string() + " 2> " +
                      err.string();
    int rc = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = slurp(out);
    res.err = slurp(err);
    return res;
}

rqmc::PointDump parse_dump(const std::string& text) {
    std::istringstream in(text);
    return rqmc::read_point_dump(in);
}

} // namespace

TEST_CASE("points on stdout reproduces the library's raw Sobol values") {
    CliResult res = run_cli("points --sampler sobol -d 2 -m 3 --scramble none");
    INFO(res.err);
    REQUIRE(res.code == 0);
    rqmc::PointDump dump = parse_dump(res.out);
    CHECK(dump.meta.dim == 2);
    CHECK(dump.meta.count == 8);
    rqmc::DigitalPointSet expect = rqmc::generate_points(rqmc::default_sobol_matrices(2), 0, 8);
    CHECK(dump.values == testutil::values_of(expect));
}

TEST_CASE("digit dumps flow through verification subcommands") {
    fs::path dump = work_dir() / "sobol16.digits";
    CliResult gen = run_cli("points --sampler sobol -d 2 -m 4 --scramble none "
                            "--format points-digits -o " + dump.string());
    REQUIRE(gen.code == 0);

    CliResult check = run_cli("check-net --in " + dump.string() + " -t 0");
    REQUIRE(check.code == 0);
    json cj = json::parse(check.out);
    CHECK(cj["pass"] == true);
    CHECK(cj["m"] == 4);

    CliResult tv = run_cli("tvalue --in " + dump.string());
    REQUIRE(tv.code == 0);
    json tj = json::parse(tv.out);
    CHECK(tj["t"] == 0);

    // Nested scrambling must preserve the exact t through the same pipeline.
    fs::path mixed = work_dir() / "scrambled16.digits";
    CliResult gen2 = run_cli("points --sampler sobol -d 2 -m 4 --seed 7 "
                             "--format points-digits -o " + mixed.string());
    REQUIRE(gen2.code == 0);
    CliResult tv2 = run_cli("tvalue --in " + mixed.string());
    REQUIRE(tv2.code == 0);
    CHECK(json::parse(tv2.out)["t"] == 0);
}

TEST_CASE("discrepancy subcommand reports the exact 16-point Sobol value") {
    fs::path dump = work_dir() / "sobol16.txt";
    REQUIRE(run_cli("points --sampler sobol -d 2 -m 4 --scramble none -o " + dump.string()).code ==
            0);
    CliResult res = run_cli("discrepancy --in " + dump.string() + " --mode exact");
    REQUIRE(res.code == 0);
    json j = json::parse(res.out);
    CHECK(j["value"].get<double>() == doctest::Approx(11.0 / 64.0).epsilon(1e-13));
    CliResult lb = run_cli("discrepancy --in " + dump.string() + " --mode lower-bound --trials 200");
    REQUIRE(lb.code == 0);
    CHECK(json::parse(lb.out)["value"].get<double>() <= 11.0 / 64.0 + 1e-12);
}

TEST_CASE("exit codes distinguish the error families") {
    CHECK(run_cli("points --no-such-flag").code == 2);          // CLI parsing
    CHECK(run_cli("points --sampler faure -b 4 -d 2 -m 2").code == 3);  // invalid config
    fs::path bad = work_dir() / "bad.dump";
    std::ofstream(bad) << "# format points-text\n# dim 1\n# count 1\nnot-a-number\n";
    CHECK(run_cli("tvalue --in " + bad.string()).code == 4);    // malformed artifact
    fs::path big = work_dir() / "big.txt";
    {
        rqmc::DumpMeta meta;
        meta.kind = "grid";
        meta.dim = 1;
        meta.count = 2048;
        std::vector<double> vals(2048);
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = (i + 0.5) / 2048.0;
        std::ofstream out(big);
        rqmc::write_points_text(out, meta, vals);
    }
    CHECK(run_cli("discrepancy --in " + big.string() + " --mode exact").code == 5);  // size limit
    CHECK(run_cli("discrepancy --in " + (work_dir() / "missing.txt").string()).code == 6);
    CHECK(run_cli("").code == 2);  // a subcommand is required
}

TEST_CASE("estimate emits single-shot and replicated JSON") {
    CliResult one = run_cli("estimate --sampler sobol -d 2 --integrand centered_product -n 64");
    REQUIRE(one.code == 0);
    json j1 = json::parse(one.out);
    CHECK(j1.contains("estimate"));
    CHECK(j1["mu"] == 0.0);
    CliResult many = run_cli(
        "estimate --sampler mc -d 2 --integrand centered_product -n 64 --replicates 100 --seed 3");
    REQUIRE(many.code == 0);
    json j2 = json::parse(many.out);
    CHECK(j2["replicates"] == 100);
    CHECK(j2["variance"].get<double>() > 0.0);
    CHECK(j2["std_error"].get<double>() ==
          doctest::Approx(std::sqrt(j2["variance"].get<double>() / 100.0)).epsilon(1e-12));
}

TEST_CASE("converge writes a CSV artifact whose echo replays byte-identically") {
    fs::path csv = work_dir() / "conv.csv";
    std::string args = "converge --sampler sobol -d 2 --integrand smooth_product --param c=1 "
                       "--m-min 4 --m-max 7 --replicates 60 --p-replicates 30 --seed 5 -o " +
                       csv.string();
    CliResult res = run_cli(args);
    INFO(res.err);
    REQUIRE(res.code == 0);
    json j = json::parse(res.out);
    CHECK(j["rows"] == 4);
    CHECK(j.contains("rmse_slope"));
    double slope = j["rmse_slope"].get<double>();
    CHECK(slope < -0.5);  // far steeper than plain MC on this smooth integrand

    std::string first = slurp(csv);
    CHECK(first.rfind("n,mean,var,rmse,p_moment,gamma_bound_var,chebychev_tail,"
                      "p_moment_bound,mc_var\n", 0) == 0);

    // The sidecar holds the argv; replaying it must reproduce the artifact.
    json echo = json::parse(slurp(rqmc::config_echo_path(csv.string())));
    REQUIRE(echo.contains("command_line"));
    std::vector<std::string> argv = echo["command_line"].get<std::vector<std::string>>();
    REQUIRE(argv.size() > 1);
    std::string replay;
    for (std::size_t i = 1; i < argv.size(); ++i) replay += (i > 1 ? " " : "") + argv[i];
    fs::remove(csv);
    CliResult again = run_cli(replay);
    REQUIRE(again.code == 0);
    CHECK(slurp(csv) == first);
}

TEST_CASE("converge results do not depend on the worker count") {
    fs::path one = work_dir() / "w1.csv";
    fs::path four = work_dir() / "w4.csv";
    std::string base = "converge --sampler sobol -d 2 --integrand kink "
                       "--m-min 4 --m-max 6 --replicates 40 --p-replicates 20 --seed 2 ";
    REQUIRE(run_cli(base + "--workers 1 -o " + one.string()).code == 0);
    REQUIRE(run_cli(base + "--workers 4 -o " + four.string()).code == 0);
    CHECK(slurp(one) == slurp(four));
}

TEST_CASE("slln summarizes final-size errors across seeds") {
    fs::path csv = work_dir() / "slln.csv";
    CliResult res = run_cli("slln --sampler sobol -d 1 --integrand smooth_product --param c=1 "
                            "-R 2 --n-max 256 --seeds 10 --seed 3 -o " + csv.string());
    INFO(res.err);
    REQUIRE(res.code == 0);
    json j = json::parse(res.out);
    CHECK(j["final_n"] == 256);
    CHECK(j["seeds"] == 10);
    CHECK(j["seeds_within_eps"].get<int>() >= 8);
    std::string text = slurp(csv);
    CHECK(text.rfind("n,err_median,err_q90,err_max\n", 0) == 0);
}

TEST_CASE("figure1 drops the three standard panels") {
    fs::path prefix = work_dir() / "fig";
    CliResult res = run_cli("figure1 -m 5 --seed 2 -o " + prefix.string());
    REQUIRE(res.code == 0);
    for (const char* kind : {"mc", "sobol", "scrambled-sobol"}) {
        fs::path file = prefix;
        file += std::string("-") + kind + ".txt";
        INFO(file.string());
        REQUIRE(fs::exists(file));
        rqmc::PointDump dump = parse_dump(slurp(file));
        CHECK(dump.meta.count == 32);
        CHECK(dump.meta.dim == 2);
        for (double v : dump.values) {
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
        }
    }
    // Raw and scrambled Sobol panels differ; the raw one is the plain net.
    rqmc::PointDump raw = parse_dump(slurp(prefix.string() + "-sobol.txt"));
    rqmc::DigitalPointSet expect = rqmc::generate_points(rqmc::default_sobol_matrices(2), 0, 32);
    CHECK(raw.values == testutil::values_of(expect));
    rqmc::PointDump mixed = parse_dump(slurp(prefix.string() + "-scrambled-sobol.txt"));
    CHECK(mixed.values != raw.values);
}

TEST_CASE("RQMC_SOBOL_FILE supplies the default direction table") {
    fs::path table = work_dir() / "dirs.txt";
    std::ofstream(table) << "d s a m_i\n2 2 1 1 3\n";
    CliResult alt = run_cli("points --sampler sobol -d 2 -m 3 --scramble none",
                            "RQMC_SOBOL_FILE=" + table.string() + " ");
    REQUIRE(alt.code == 0);
    CliResult builtin = run_cli("points --sampler sobol -d 2 -m 3 --scramble none");
    REQUIRE(builtin.code == 0);
    CHECK(alt.out != builtin.out);
    // An explicit flag wins over the environment.
    CliResult flagged = run_cli("points --sampler sobol -d 2 -m 3 --scramble none "
                                "--direction-file " + table.string());
    REQUIRE(flagged.code == 0);
    CHECK(flagged.out == alt.out);
}
