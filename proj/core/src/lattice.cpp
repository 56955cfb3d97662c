#include "rqmc/lattice.hpp"

#include <numeric>

#include "rqmc/rng.hpp"

namespace rqmc {

LatticeRule make_lattice_rule(std::uint64_t n, std::vector<std::uint64_t> z) {
    if (n < 1) throw config_error("lattice rule needs n >= 1");
    if (z.empty()) throw config_error("lattice rule needs at least one generator component");
    for (auto& zj : z) {
        zj %= n;
        if (n > 1 && std::gcd(zj, n) != 1)
            throw config_error("lattice generator component not coprime to n");
    }
    return {n, std::move(z)};
}

LatticeRule korobov_rule(std::uint64_t n, std::uint64_t a, int dim) {
    if (dim < 1) throw config_error("korobov_rule: dim must be >= 1");
    if (n < 1) throw config_error("korobov_rule: n must be >= 1");
    std::vector<std::uint64_t> z(static_cast<std::size_t>(dim));
    std::uint64_t p = 1 % n;
    for (int j = 0; j < dim; ++j) {
        z[static_cast<std::size_t>(j)] = p;
        p = static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(p) * (a % n)) % n);
    }
    return make_lattice_rule(n, std::move(z));
}

std::vector<double> lattice_points(const LatticeRule& rule) {
    const int d = rule.dim();
    std::vector<double> out(rule.n * static_cast<std::size_t>(d));
    const auto n = static_cast<double>(rule.n);
    for (std::uint64_t i = 0; i < rule.n; ++i)
        for (int j = 0; j < d; ++j) {
            const std::uint64_t num = static_cast<std::uint64_t>(
                (static_cast<unsigned __int128>(i) * rule.z[static_cast<std::size_t>(j)]) %
                rule.n);
            out[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
                static_cast<double>(num) / n;
        }
    return out;
}

std::vector<double> cranley_patterson(std::span<const double> points, std::span<const double> u) {
    if (u.empty() || points.size() % u.size() != 0)
        throw config_error("cranley_patterson: point block not divisible by dim");
    for (const double uj : u)
        if (!(uj >= 0.0 && uj < 1.0))
            throw config_error("cranley_patterson: shift outside [0,1)");
    std::vector<double> out(points.size());
    const std::size_t d = u.size();
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
        const double a = points[idx];
        if (!(a >= 0.0 && a < 1.0))
            throw config_error("cranley_patterson: coordinate outside [0,1)");
        double y = a + u[idx % d];
        if (y >= 1.0) y -= 1.0;
        out[idx] = y;
    }
    return out;
}

std::vector<double> rotation_shift(int dim, std::uint64_t seed, std::uint64_t replicate) {
    if (dim < 1) throw config_error("rotation_shift: dim must be >= 1");
    std::vector<double> u(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j)
        u[static_cast<std::size_t>(j)] = unit_double(keyed_hash(
            seed, replicate, role_word(RandomRole::lattice_rotation, static_cast<std::uint64_t>(j))));
    return u;
}

} // namespace rqmc
