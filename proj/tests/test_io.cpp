#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "rqmc/io.hpp"
#include "rqmc/netgen.hpp"
#include "support/testutil.hpp"

using namespace rqmc;

TEST_CASE("format_double round-trips doubles exactly") {
    for (double v : {0.0, -0.0, 1.0 / 3.0, 0.1, -2.5e-300, 1e308, 4.9e-324,
                     0.1234567890123456789, -7.0 / 9.0}) {
        std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("text dumps round-trip values and metadata") {
    DumpMeta meta;
    meta.kind = "scrambled-sobol";
    meta.base = 2;
    meta.dim = 3;
    meta.precision = 32;
    meta.seed = 42;
    meta.replicate = 7;
    meta.index_start = 16;
    meta.count = 4;
    meta.extra["order"] = "natural";
    std::vector<double> values = {0.5, 0.25, 0.125, 0.75, 1.0 / 3.0, 0.9,
                                  0.0,  0.1,  0.2,   0.3,  0.4,      0.5};
    std::ostringstream out;
    write_points_text(out, meta, values);
    std::istringstream in(out.str());
    PointDump dump = read_point_dump(in);
    CHECK(dump.format == "points-text");
    CHECK(dump.meta.kind == "scrambled-sobol");
    CHECK(dump.meta.dim == 3);
    CHECK(dump.meta.seed == 42);
    CHECK(dump.meta.replicate == 7);
    CHECK(dump.meta.index_start == 16);
    CHECK(dump.meta.count == 4);
    CHECK(dump.meta.extra.at("order") == "natural");
    CHECK(dump.values == values);
    CHECK_FALSE(dump.digits.has_value());
}

TEST_CASE("digit dumps round-trip exactly, base 2 and base 3") {
    for (auto [base, dim, count] : {std::tuple{2, 2, 16}, std::tuple{3, 2, 9}}) {
        GeneratorMatrixSet g =
            base == 2 ? default_sobol_matrices(dim) : faure_matrices(base, dim);
        DigitalPointSet pts = generate_points(g, 0, static_cast<std::uint64_t>(count));
        DumpMeta meta;
        meta.kind = "net";
        meta.base = base;
        meta.dim = dim;
        meta.precision = pts.precision();
        meta.count = static_cast<std::uint64_t>(count);
        std::ostringstream out;
        write_points_digits(out, meta, pts);
        std::istringstream in(out.str());
        PointDump dump = read_point_dump(in);
        CHECK(dump.format == "points-digits");
        REQUIRE(dump.digits.has_value());
        CHECK(dump.digits->base() == base);
        CHECK(dump.digits->precision() == pts.precision());
        REQUIRE(dump.digits->size() == pts.size());
        for (std::size_t p = 0; p < pts.size(); ++p)
            for (int j = 0; j < dim; ++j) {
                auto a = pts.coord_digits(p, j);
                auto b = dump.digits->coord_digits(p, j);
                REQUIRE(a.size() == b.size());
                for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
                CHECK(dump.values[p * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)] ==
                      pts.value(p, j));
            }
    }
}

TEST_CASE("malformed dumps raise parse_error") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_point_dump(in);
    };
    CHECK_THROWS_AS(parse("0.5 0.5\n"), parse_error);  // no format header
    CHECK_THROWS_AS(parse("# format points-text\n0.5\n"), parse_error);  // no dim
    CHECK_THROWS_AS(parse("# format points-text\n# dim 2\n# count 1\n0.5\n"),
                    parse_error);  // short row
    CHECK_THROWS_AS(parse("# format points-text\n# dim 1\n# count 2\n0.5\n"),
                    parse_error);  // count mismatch
    CHECK_THROWS_AS(parse("# format points-text\n# dim 1\n# count 1\nabc\n"),
                    parse_error);  // unparseable value
    CHECK_THROWS_AS(parse("# format points-digits\n# dim 1\n# count 1\n01\n"),
                    parse_error);  // digits need base and precision
    CHECK_THROWS_AS(
        parse("# format points-digits\n# base 2\n# precision 4\n# dim 1\n# count 1\n0121\n"),
        parse_error);  // digit 2 invalid in base 2
    CHECK_THROWS_AS(
        parse("# format points-digits\n# base 2\n# precision 4\n# dim 1\n# count 1\n011\n"),
        parse_error);  // wrong digit count
    CHECK_THROWS_AS(parse("# format what\n# dim 1\n# count 0\n"), parse_error);
}

TEST_CASE("convergence CSV prints the fixed header and empty NaN cells") {
    ConvergenceReport rep;
    rep.base = 2;
    ConvergenceRow a;
    a.n = 16;
    a.r = 1;
    a.m = 4;
    a.mean = 0.5;
    a.var = 0.03125;
    a.rmse = 0.25;
    a.p_moment = 0.125;
    a.gamma_bound_var = 0.0625;
    a.chebychev_tail = 1.0;
    a.p_moment_bound = 0.4419417382415922;
    a.mc_var = 0.0052083333333333330;
    ConvergenceRow b;
    b.n = 32;
    b.r = 1;
    b.m = 5;
    b.mean = 0.25;
    b.var = 0.015625;
    // every other column stays NaN
    rep.rows = {a, b};
    std::ostringstream out;
    write_convergence_csv(out, rep);
    std::string expect =
        "n,mean,var,rmse,p_moment,gamma_bound_var,chebychev_tail,p_moment_bound,mc_var\n"
        "16,0.5,0.03125,0.25,0.125,0.0625,1,0.44194173824159222,0.005208333333333333\n"
        "32,0.25,0.015625,,,,,,\n";
    CHECK(out.str() == expect);
}

TEST_CASE("slln CSV lists quantiles per schedule size") {
    SllnReport rep;
    rep.ns = {1, 2, 4};
    rep.err_median = {0.5, 0.25, 0.125};
    rep.err_q90 = {0.75, 0.5, 0.25};
    rep.err_max = {1.0, 0.75, 0.5};
    std::ostringstream out;
    write_slln_csv(out, rep);
    std::string expect =
        "n,err_median,err_q90,err_max\n"
        "1,0.5,0.75,1\n"
        "2,0.25,0.5,0.75\n"
        "4,0.125,0.25,0.5\n";
    CHECK(out.str() == expect);
}

TEST_CASE("atomic writes land complete or not at all") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "rqmc_io_test";
    fs::create_directories(dir);
    fs::path target = dir / "artifact.csv";
    write_file_atomic(target.string(), "hello\nworld\n");
    std::ifstream in(target);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == "hello\nworld\n");
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));
    // Overwrite is atomic too.
    write_file_atomic(target.string(), "second");
    std::ifstream in2(target);
    std::stringstream buf2;
    buf2 << in2.rdbuf();
    CHECK(buf2.str() == "second");
    CHECK_THROWS_AS(write_file_atomic((dir / "missing" / "x.csv").string(), "y"), io_error);
    fs::remove_all(dir);
}

TEST_CASE("config echo sits next to the artifact") {
    CHECK(config_echo_path("out/points.txt") == "out/points.txt.config.json");
    CHECK(config_echo_path("run.csv") == "run.csv.config.json");
}
