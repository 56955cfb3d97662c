#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "rqmc/netgen.hpp"
#include "rqmc/scramble.hpp"
#include "rqmc/verify.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace rqmc;

namespace {

ScrambleSpec spec_of(ScrambleKind kind, int base, int dim, std::uint64_t seed,
                     std::uint64_t replicate = 0, int depth = 0) {
    ScrambleSpec s;
    s.kind = kind;
    s.base = base;
    s.dim = dim;
    s.depth = depth;
    s.seed = seed;
    s.replicate = replicate;
    return s;
}

} // namespace

TEST_CASE("scrambling is a pure function of (spec, points)") {
    GeneratorMatrixSet g = default_sobol_matrices(3);
    DigitalPointSet pts = generate_points(g, 0, 32);
    for (ScrambleKind kind : {ScrambleKind::nested_uniform, ScrambleKind::linear,
                              ScrambleKind::digital_shift}) {
        ScrambleSpec s = spec_of(kind, 2, 3, 42, 7);
        DigitalPointSet a = scramble_points(pts, s);
        DigitalPointSet b = scramble_points(pts, s);
        CHECK(testutil::values_of(a) == testutil::values_of(b));
        s.replicate = 8;
        DigitalPointSet c = scramble_points(pts, s);
        CHECK(testutil::values_of(a) != testutil::values_of(c));
        s.replicate = 7;
        s.seed = 43;
        DigitalPointSet d = scramble_points(pts, s);
        CHECK(testutil::values_of(a) != testutil::values_of(d));
    }
}

TEST_CASE("kind none is the identity") {
    GeneratorMatrixSet g = default_sobol_matrices(2);
    DigitalPointSet pts = generate_points(g, 0, 16);
    DigitalPointSet out = scramble_points(pts, spec_of(ScrambleKind::none, 2, 2, 5));
    CHECK(testutil::values_of(out) == testutil::values_of(pts));
}

TEST_CASE("digital shift under the null seed is the identity (test hook)") {
    GeneratorMatrixSet g = faure_matrices(3, 2);
    DigitalPointSet pts = generate_points(g, 0, 27);
    ScrambleSpec s = spec_of(ScrambleKind::digital_shift, 3, 2, ScrambleSpec::null_seed);
    DigitalPointSet out = scramble_points(pts, s);
    for (std::size_t p = 0; p < pts.size(); ++p)
        for (int j = 0; j < 2; ++j) CHECK(out.value(p, j) == pts.value(p, j));
}

TEST_CASE("digital shift adds one fixed digit vector to every point") {
    GeneratorMatrixSet g = faure_matrices(3, 2);
    DigitalPointSet pts = generate_points(g, 0, 27);
    ScrambleSpec s = spec_of(ScrambleKind::digital_shift, 3, 2, 11);
    DigitalPointSet out = scramble_points(pts, s);
    // Point 0 has all-zero digits, so its image is the shift itself.
    for (std::size_t p = 1; p < pts.size(); ++p) {
        for (int j = 0; j < 2; ++j) {
            auto x = pts.coord_digits(p, j);
            auto e = out.coord_digits(0, j);
            auto y = out.coord_digits(p, j);
            for (std::size_t k = 0; k < x.size(); ++k)
                CHECK(static_cast<int>(y[k]) == (x[k] + e[k]) % 3);
        }
    }
}

TEST_CASE("linear scramble acts linearly on base-2 digit vectors") {
    GeneratorMatrixSet g = default_sobol_matrices(2);
    DigitalPointSet pts = generate_points(g, 0, 8);
    DigitalPointSet out = scramble_points(pts, spec_of(ScrambleKind::linear, 2, 2, 3));
    // Digits of generated points satisfy d(1) xor d(2) = d(3); after an
    // affine map y = Lx + e the shifted images preserve that relation.
    for (int j = 0; j < 2; ++j) {
        auto y0 = out.coord_digits(0, j);
        auto y1 = out.coord_digits(1, j);
        auto y2 = out.coord_digits(2, j);
        auto y3 = out.coord_digits(3, j);
        for (std::size_t k = 0; k < y0.size(); ++k) {
            int lhs = (y3[k] ^ y0[k]);
            int rhs = (y1[k] ^ y0[k]) ^ (y2[k] ^ y0[k]);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("nested uniform scrambling is keyed by the original digit prefix") {
    for (int base : {2, 3, 5}) {
        ScrambleState state(spec_of(ScrambleKind::nested_uniform, base, 1, 77, 0, 12));
        std::vector<std::uint8_t> a(12, 0), b(12, 0), ya(12), yb(12);
        // Same first 5 digits, diverge at position 5, arbitrary tails.
        for (int k = 0; k < 5; ++k) a[k] = b[k] = static_cast<std::uint8_t>(k % base);
        a[5] = 0;
        b[5] = static_cast<std::uint8_t>(base - 1);
        for (int k = 6; k < 12; ++k) {
            a[k] = static_cast<std::uint8_t>((k + 1) % base);
            b[k] = static_cast<std::uint8_t>((k + 2) % base);
        }
        state.apply(0, a.data(), ya.data());
        state.apply(0, b.data(), yb.data());
        for (int k = 0; k < 5; ++k) CHECK(ya[k] == yb[k]);  // shared path
        CHECK(ya[5] != yb[5]);  // same permutation, different inputs
        for (int k = 0; k < 12; ++k) {
            CHECK(ya[k] < base);
            CHECK(yb[k] < base);
        }
    }
}

TEST_CASE("nested uniform scrambling preserves the exact t of Sobol prefixes") {
    GeneratorMatrixSet g = default_sobol_matrices(4);
    for (int m : {4, 6, 8}) {
        DigitalPointSet raw = generate_points(g, 0, 1ull << m);
        int t_raw = exact_t(raw, m);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            DigitalPointSet mixed =
                scramble_points(raw, spec_of(ScrambleKind::nested_uniform, 2, 4, seed));
            CHECK(exact_t(mixed, m) == t_raw);
        }
    }
}

TEST_CASE("scrambled Faure sets keep the net property (oracle counted)") {
    GeneratorMatrixSet g = faure_matrices(3, 2);
    DigitalPointSet raw = generate_points(g, 0, 27);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        DigitalPointSet mixed =
            scramble_points(raw, spec_of(ScrambleKind::nested_uniform, 3, 2, seed));
        oracle::DigitTensor tensor = testutil::to_tensor(mixed, 3);
        CHECK(oracle::is_net(tensor, 3, 3, 0));
    }
}

TEST_CASE("all scramble kinds preserve elementary-interval balance in base 2") {
    GeneratorMatrixSet g = default_sobol_matrices(3);
    DigitalPointSet raw = generate_points(g, 0, 64);
    int t_raw = exact_t(raw, 6);
    for (ScrambleKind kind : {ScrambleKind::linear, ScrambleKind::digital_shift}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            DigitalPointSet mixed = scramble_points(raw, spec_of(kind, 2, 3, seed));
            CHECK(exact_t(mixed, 6) == t_raw);
        }
    }
}

TEST_CASE("scrambled output precision equals the requested depth") {
    GeneratorMatrixSet g = default_sobol_matrices(2, 8);
    DigitalPointSet pts = generate_points(g, 0, 16);
    CHECK(pts.precision() == 8);
    DigitalPointSet shallow =
        scramble_points(pts, spec_of(ScrambleKind::nested_uniform, 2, 2, 9, 0, 8));
    DigitalPointSet deep =
        scramble_points(pts, spec_of(ScrambleKind::nested_uniform, 2, 2, 9, 0, 32));
    CHECK(shallow.precision() == 8);
    CHECK(deep.precision() == 32);
    // The extra digits only refine within the original 8-digit cell.
    for (std::size_t p = 0; p < pts.size(); ++p)
        for (int j = 0; j < 2; ++j)
            CHECK(deep.prefix(p, j, 8) == shallow.prefix(p, j, 8));
}

TEST_CASE("scramble_stream matches scramble_points over the same range") {
    GeneratorMatrixSet g = default_sobol_matrices(2);
    ScrambleSpec s = spec_of(ScrambleKind::nested_uniform, 2, 2, 13);
    DigitalPointSet via_points = scramble_points(generate_points(g, 8, 24), s);
    DigitalPointSet via_stream = scramble_stream(g, s, 8, 24);
    CHECK(testutil::values_of(via_points) == testutil::values_of(via_stream));
}

TEST_CASE("ScrambledStream::next walks the same values as scramble_stream") {
    GeneratorMatrixSet g = default_sobol_matrices(3);
    ScrambleSpec s = spec_of(ScrambleKind::nested_uniform, 2, 3, 21, 4);
    DigitalPointSet batch = scramble_stream(g, s, 0, 32);
    ScrambledStream stream(g, s);
    double x[3];
    for (std::size_t i = 0; i < 32; ++i) {
        stream.next(x);
        for (int j = 0; j < 3; ++j) CHECK(x[j] == batch.value(i, j));
    }
    // Random access agrees with the sequential walk.
    stream.point_at(17, x);
    for (int j = 0; j < 3; ++j) CHECK(x[j] == batch.value(17, j));
}

TEST_CASE("scrambled marginals look uniform across replicates") {
    GeneratorMatrixSet g = default_sobol_matrices(2);
    ScrambleSpec s = spec_of(ScrambleKind::nested_uniform, 2, 2, 31);
    std::vector<double> first_coord;
    double x[2];
    for (std::uint64_t rep = 0; rep < 2000; ++rep) {
        s.replicate = rep;
        ScrambledStream stream(g, s);
        stream.point_at(0, x);
        first_coord.push_back(x[0]);
    }
    ChiSquareReport chi = uniformity_chi_square(first_coord, 8);
    CHECK(chi.accept);
}

TEST_CASE("scramble validation errors") {
    GeneratorMatrixSet g = default_sobol_matrices(2);
    DigitalPointSet pts = generate_points(g, 0, 8);
    CHECK_THROWS_AS(scramble_points(pts, spec_of(ScrambleKind::nested_uniform, 3, 2, 1)),
                    config_error);  // base mismatch
    CHECK_THROWS_AS(scramble_points(pts, spec_of(ScrambleKind::nested_uniform, 2, 3, 1)),
                    config_error);  // dim mismatch
    CHECK_THROWS_AS(scramble_points(pts, spec_of(ScrambleKind::nested_uniform, 2, 2, 1, 0, 8)),
                    config_error);  // depth below the stored precision
    CHECK_THROWS_AS(ScrambleState(spec_of(ScrambleKind::nested_uniform, 23, 1, 1)),
                    config_error);  // nested permutations stop at base 20
    CHECK_NOTHROW(ScrambleState(spec_of(ScrambleKind::digital_shift, 23, 1, 1)));
    DigitalPointSet plain = DigitalPointSet::from_values(2, 2, 32, {0.5, 0.25}, false);
    CHECK_THROWS_AS(scramble_points(plain, spec_of(ScrambleKind::nested_uniform, 2, 2, 1)),
                    config_error);  // no digit data
}
