#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written the straightforward way (direct
// counting, exact rationals, dense grids) and shares no code with core/.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

// Radical inverse as an exact rational: digits of i in base b mirrored
// across the radix point. den = b^(digit count), not reduced.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
};
Rational radical_inverse(std::uint64_t i, int base);

// pts[p][j][k]: digit k of coordinate j of point p, most significant first.
using DigitTensor = std::vector<std::vector<std::vector<std::uint8_t>>>;

// Are all elementary intervals of total resolution s (every shape k with
// |k| = s, every anchor) occupied by exactly b^(m-s) of the b^m points?
bool level_balanced(const DigitTensor& pts, int base, int m, int s);

// Net property at t: every level s <= m - t balanced.
bool is_net(const DigitTensor& pts, int base, int m, int t);

// Smallest t for which is_net holds (full scan, no shortcuts).
int exact_t(const DigitTensor& pts, int base, int m);

// Star discrepancy evaluated on the uniform corner grid {i/G} with both the
// open-box deficit and closed-box excess at every corner. Always within
// 2*dim/G below the exact value (and never meaningfully above it).
// Supports dim 1 and 2.
double star_discrepancy_grid(std::span<const double> points, int dim, int grid);

// Exact star discrepancy by direct counting over the critical corner grid
// (point coordinates plus 1 per axis). O(C^dim * n * dim); small sets only.
double naive_star_small(std::span<const double> points, int dim);

// Members of {r b^m : 1 <= r <= R} up to n_max, by double loop.
std::vector<std::uint64_t> schedule_enum(int R, int base, std::uint64_t n_max);

// Nearest schedule members below/above n, read off the enumeration.
std::pair<std::uint64_t, std::uint64_t> bracket_enum(std::uint64_t n, int R, int base);

// Is x^s + a_1 x^(s-1) + ... + a_(s-1) x + 1 primitive over GF(2)?
// a packs the middle coefficients with a_1 in the highest of s-1 bits.
bool primitive_poly_gf2(int degree, std::uint32_t a);

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
};

// Plain Monte Carlo mean of g over [0,1)^dim using mt19937_64, independent
// of the library's counter-based generator. se is the standard error.
McEstimate mc_mean(const std::function<double(std::span<const double>)>& g, int dim,
                   std::uint64_t samples, std::uint64_t seed);

} // namespace oracle
