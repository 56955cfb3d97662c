#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rqmc/errors.hpp"

namespace rqmc {

// Rank-1 lattice rule: point i has coordinates frac(i * z / n).
struct LatticeRule {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> z;

    int dim() const { return static_cast<int>(z.size()); }
};

// Validates n >= 1, dim >= 1 and gcd(z_j, n) = 1 for every component.
LatticeRule make_lattice_rule(std::uint64_t n, std::vector<std::uint64_t> z);

// Korobov form z = (1, a, a^2, ...) mod n.
LatticeRule korobov_rule(std::uint64_t n, std::uint64_t a, int dim);

// All n points, row-major n x dim. Coordinates are exact multiples of 1/n
// computed with integer arithmetic before the single division.
std::vector<double> lattice_points(const LatticeRule& rule);

// Cranley-Patterson rotation y = frac(a + u) applied to each point (row-major
// points, one shift vector u of length dim).
std::vector<double> cranley_patterson(std::span<const double> points, std::span<const double> u);

// Rotation vector drawn from the shared counter-based source.
std::vector<double> rotation_shift(int dim, std::uint64_t seed, std::uint64_t replicate);

} // namespace rqmc
