#include "rqmc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rqmc/rng.hpp"
#include "rqmc/stats.hpp"

namespace rqmc {

namespace {

using u128 = unsigned __int128;

std::uint64_t checked_pow(int base, int m) {
    u128 p = 1;
    for (int i = 0; i < m; ++i) {
        p *= static_cast<unsigned>(base);
        if (p > (static_cast<u128>(1) << 62)) throw limit_error("b^m too large for net check");
    }
    return static_cast<std::uint64_t>(p);
}

// Per-axis prefix codes pref[j][q][i]: first q digits of point i, axis j.
struct PrefixTables {
    int dim;
    int depth;
    std::size_t n;
    std::vector<std::uint32_t> data;  // [(j*(depth+1)+q)*n + i]

    const std::uint32_t* at(int j, int q) const {
        return data.data() + (static_cast<std::size_t>(j) * (depth + 1) + q) * n;
    }
};

PrefixTables build_prefixes(const DigitalPointSet& pts, int depth) {
    PrefixTables t{pts.dim(), depth, pts.size(), {}};
    t.data.assign(static_cast<std::size_t>(pts.dim()) * (depth + 1) * pts.size(), 0);
    const auto b = static_cast<std::uint32_t>(pts.base());
    for (int j = 0; j < pts.dim(); ++j) {
        for (int q = 1; q <= depth; ++q) {
            const std::uint32_t* prev = t.at(j, q - 1);
            auto* cur = t.data.data() +
                        (static_cast<std::size_t>(j) * (depth + 1) + q) * pts.size();
            for (std::size_t i = 0; i < pts.size(); ++i)
                cur[i] = prev[i] * b + pts.coord_digits(i, j)[q - 1];
        }
    }
    return t;
}

// Visits every k >= 0 with |k| = s; k is reused storage.
void for_each_shape(int dim, int s, std::vector<int>& k,
                    const std::function<bool(const std::vector<int>&)>& visit, int j = 0,
                    int rem = -1, bool* stop = nullptr) {
    bool stop_local = false;
    if (stop == nullptr) stop = &stop_local;
    if (rem < 0) rem = s;
    if (j == dim - 1) {
        k[static_cast<std::size_t>(j)] = rem;
        if (!visit(k)) *stop = true;
        return;
    }
    for (int v = 0; v <= rem && !*stop; ++v) {
        k[static_cast<std::size_t>(j)] = v;
        for_each_shape(dim, s, k, visit, j + 1, rem - v, stop);
    }
}

// Checks one shape; fills witness and returns false on the first unbalanced
// cell. counts is scratch of size >= b^s.
bool check_shape(const DigitalPointSet& pts, const PrefixTables& pref,
                 const std::vector<int>& k, int s, int m, std::vector<std::uint32_t>& counts,
                 IntervalWitness* witness) {
    const int d = pts.dim();
    const int b = pts.base();
    const std::uint64_t cells = checked_pow(b, s);
    const std::uint64_t required = checked_pow(b, m - s);
    counts.assign(cells, 0);
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t idx = 0;
        for (int j = 0; j < d; ++j) {
            const int kj = k[static_cast<std::size_t>(j)];
            idx = idx * checked_pow(b, kj) + pref.at(j, kj)[i];
        }
        ++counts[idx];
    }
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        if (counts[cell] != required) {
            if (witness != nullptr) {
                witness->k = k;
                witness->observed = counts[cell];
                witness->required = required;
                witness->c.assign(static_cast<std::size_t>(d), 0);
                std::uint64_t rest = cell;
                for (int j = d - 1; j >= 0; --j) {
                    const std::uint64_t w = checked_pow(b, k[static_cast<std::size_t>(j)]);
                    witness->c[static_cast<std::size_t>(j)] = rest % w;
                    rest /= w;
                }
            }
            return false;
        }
    }
    return true;
}

void validate_net_args(const DigitalPointSet& pts, int t, int m) {
    if (m < 0) throw config_error("check_net: m must be >= 0");
    if (t < 0 || t > m) throw config_error("check_net: need 0 <= t <= m");
    if (!pts.has_digits()) throw config_error("check_net: point set has no digit data");
    if (pts.precision() < m)
        throw config_error("check_net: point precision is below m digits");
    if (pts.size() != checked_pow(pts.base(), m))
        throw config_error("check_net: point count is not b^m");
}

} // namespace

NetCheckReport check_net(const DigitalPointSet& pts, int t, int m) {
    validate_net_args(pts, t, m);
    NetCheckReport report;
    report.m = m;
    report.t = t;
    const PrefixTables pref = build_prefixes(pts, m);
    std::vector<std::uint32_t> counts;
    std::vector<int> k(static_cast<std::size_t>(pts.dim()));
    IntervalWitness witness;
    for (int s = 1; s <= m - t; ++s) {
        bool ok = true;
        for_each_shape(pts.dim(), s, k, [&](const std::vector<int>& shape) {
            ++report.shapes_checked;
            if (!check_shape(pts, pref, shape, s, m, counts, &witness)) {
                ok = false;
                return false;
            }
            return true;
        });
        if (!ok) {
            report.pass = false;
            report.witness = witness;
            return report;
        }
    }
    report.pass = true;
    return report;
}

int exact_t(const DigitalPointSet& pts, int m) {
    validate_net_args(pts, 0, m);
    const PrefixTables pref = build_prefixes(pts, m);
    std::vector<std::uint32_t> counts;
    std::vector<int> k(static_cast<std::size_t>(pts.dim()));
    // balance at level s implies balance below it, so scan levels upward and
    // stop at the first shortfall (candidate t descends from m as s grows)
    for (int s = 1; s <= m; ++s) {
        bool ok = true;
        for_each_shape(pts.dim(), s, k, [&](const std::vector<int>& shape) {
            if (!check_shape(pts, pref, shape, s, m, counts, nullptr)) {
                ok = false;
                return false;
            }
            return true;
        });
        if (!ok) return m - (s - 1);
    }
    return 0;
}

SequenceCheckReport check_sequence(const GeneratorMatrixSet& g,
                                   const std::optional<ScrambleSpec>& scramble, int t, int m_max,
                                   int r_max) {
    if (t < 0) throw config_error("check_sequence: t must be >= 0");
    if (r_max < 1) throw config_error("check_sequence: r_max must be >= 1");
    if (m_max > g.precision())
        throw config_error("check_sequence: m_max exceeds generator precision");
    SequenceCheckReport report;
    for (int m = t; m <= m_max; ++m) {
        const std::uint64_t bm = checked_pow(g.base(), m);
        for (int r = 1; r <= r_max; ++r) {
            const std::uint64_t i_start = (static_cast<std::uint64_t>(r) - 1) * bm;
            if (i_start > g.index_capacity() - bm)
                throw limit_error("check_sequence: block exceeds b^E points");
            const DigitalPointSet block =
                scramble ? scramble_stream(g, *scramble, i_start, bm)
                         : generate_points(g, i_start, bm);
            const NetCheckReport net = check_net(block, t, m);
            if (!net.pass) {
                report.pass = false;
                report.fail_m = m;
                report.fail_r = static_cast<std::uint64_t>(r);
                report.witness = net.witness;
                return report;
            }
        }
    }
    return report;
}

namespace {

constexpr std::size_t kDiscrepancyMaxN = 1024;

struct Axis {
    std::vector<double> values;  // sorted coordinates of the points
    std::vector<double> cands;   // sorted unique coordinates plus 1.0
};

std::vector<Axis> build_axes(std::span<const double> points, int dim, std::size_t n) {
    std::vector<Axis> axes(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
        auto& ax = axes[static_cast<std::size_t>(j)];
        ax.values.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = points[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
            if (!(v >= 0.0 && v < 1.0))
                throw config_error("star discrepancy: coordinate outside [0,1)");
            ax.values.push_back(v);
        }
        std::sort(ax.values.begin(), ax.values.end());
        ax.cands = ax.values;
        ax.cands.erase(std::unique(ax.cands.begin(), ax.cands.end()), ax.cands.end());
        ax.cands.push_back(1.0);
    }
    return axes;
}

std::size_t rank_of(const std::vector<double>& cands, double v) {
    return static_cast<std::size_t>(
        std::lower_bound(cands.begin(), cands.end(), v) - cands.begin());
}

void consider(DiscrepancyResult& best, double value, std::span<const double> corner) {
    if (value > best.value) {
        best.value = value;
        best.witness.assign(corner.begin(), corner.end());
    }
}

// 2D prefix grid: P[u][v] = number of points with rank_x < u and rank_y < v.
struct Prefix2D {
    std::size_t cy1;
    std::vector<std::int32_t> p;  // (cx+1) x (cy+1)

    std::int32_t at(std::size_t u, std::size_t v) const { return p[u * cy1 + v]; }
};

Prefix2D prefix_from_occupancy(const std::vector<std::int32_t>& occ, std::size_t cx,
                               std::size_t cy) {
    Prefix2D out{cy + 1, std::vector<std::int32_t>((cx + 1) * (cy + 1), 0)};
    for (std::size_t u = 0; u < cx; ++u)
        for (std::size_t v = 0; v < cy; ++v)
            out.p[(u + 1) * out.cy1 + (v + 1)] =
                occ[u * cy + v] + out.p[u * out.cy1 + (v + 1)] +
                out.p[(u + 1) * out.cy1 + v] - out.p[u * out.cy1 + v];
    return out;
}

DiscrepancyResult exact_1d(const Axis& ax, std::size_t n) {
    DiscrepancyResult best{-1.0, DiscrepancyMode::exact, {}};
    const auto dn = static_cast<double>(n);
    for (const double a : ax.cands) {
        const auto open = static_cast<double>(
            std::lower_bound(ax.values.begin(), ax.values.end(), a) - ax.values.begin());
        const auto closed = static_cast<double>(
            std::upper_bound(ax.values.begin(), ax.values.end(), a) - ax.values.begin());
        const double corner[1] = {a};
        consider(best, std::max(a - open / dn, closed / dn - a), corner);
    }
    return best;
}

DiscrepancyResult exact_2d(std::span<const double> points, const std::vector<Axis>& axes,
                           std::size_t n) {
    const auto& X = axes[0].cands;
    const auto& Y = axes[1].cands;
    const std::size_t cx = X.size();
    const std::size_t cy = Y.size();
    std::vector<std::int32_t> occ(cx * cy, 0);
    for (std::size_t i = 0; i < n; ++i)
        ++occ[rank_of(X, points[i * 2]) * cy + rank_of(Y, points[i * 2 + 1])];
    const Prefix2D P = prefix_from_occupancy(occ, cx, cy);
    DiscrepancyResult best{-1.0, DiscrepancyMode::exact, {}};
    const auto dn = static_cast<double>(n);
    for (std::size_t u = 0; u < cx; ++u)
        for (std::size_t v = 0; v < cy; ++v) {
            const double vol = X[u] * Y[v];
            const double open = vol - static_cast<double>(P.at(u, v)) / dn;
            const double closed = static_cast<double>(P.at(u + 1, v + 1)) / dn - vol;
            const double corner[2] = {X[u], Y[v]};
            consider(best, std::max(open, closed), corner);
        }
    return best;
}

DiscrepancyResult exact_3d(std::span<const double> points, const std::vector<Axis>& axes,
                           std::size_t n) {
    const auto& X = axes[0].cands;
    const auto& Y = axes[1].cands;
    const auto& Z = axes[2].cands;
    const std::size_t cx = X.size();
    const std::size_t cy = Y.size();
    const std::size_t cz = Z.size();
    std::vector<std::vector<std::size_t>> slab(cx);
    for (std::size_t i = 0; i < n; ++i) slab[rank_of(X, points[i * 3])].push_back(i);

    std::vector<std::int32_t> occ(cy * cz, 0);
    Prefix2D open_grid{cz + 1, std::vector<std::int32_t>((cy + 1) * (cz + 1), 0)};
    DiscrepancyResult best{-1.0, DiscrepancyMode::exact, {}};
    const auto dn = static_cast<double>(n);
    for (std::size_t u = 0; u < cx; ++u) {
        for (const std::size_t i : slab[u])
            ++occ[rank_of(Y, points[i * 3 + 1]) * cz + rank_of(Z, points[i * 3 + 2])];
        Prefix2D closed_grid = prefix_from_occupancy(occ, cy, cz);
        for (std::size_t v = 0; v < cy; ++v)
            for (std::size_t w = 0; w < cz; ++w) {
                const double vol = X[u] * Y[v] * Z[w];
                const double open = vol - static_cast<double>(open_grid.at(v, w)) / dn;
                const double closed =
                    static_cast<double>(closed_grid.at(v + 1, w + 1)) / dn - vol;
                const double corner[3] = {X[u], Y[v], Z[w]};
                consider(best, std::max(open, closed), corner);
            }
        open_grid = std::move(closed_grid);
    }
    return best;
}

std::size_t point_count(std::span<const double> points, int dim) {
    if (dim < 1) throw config_error("star discrepancy: dim must be >= 1");
    if (points.empty() || points.size() % static_cast<std::size_t>(dim) != 0)
        throw config_error("star discrepancy: point block not divisible by dim");
    return points.size() / static_cast<std::size_t>(dim);
}

double local_discrepancy(std::span<const double> points, int dim, std::size_t n,
                         std::span<const double> corner) {
    std::size_t open = 0, closed = 0;
    double vol = 1.0;
    for (int j = 0; j < dim; ++j) vol *= corner[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < n; ++i) {
        bool in_open = true, in_closed = true;
        for (int j = 0; j < dim && (in_open || in_closed); ++j) {
            const double x = points[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
            const double a = corner[static_cast<std::size_t>(j)];
            if (!(x < a)) in_open = false;
            if (!(x <= a)) in_closed = false;
        }
        open += in_open ? 1 : 0;
        closed += in_closed ? 1 : 0;
    }
    const auto dn = static_cast<double>(n);
    return std::max(vol - static_cast<double>(open) / dn,
                    static_cast<double>(closed) / dn - vol);
}

} // namespace

DiscrepancyResult star_discrepancy_exact(std::span<const double> points, int dim) {
    const std::size_t n = point_count(points, dim);
    if (dim > 3)
        throw limit_error("star_discrepancy_exact: dim > 3 unsupported; use lower-bound mode");
    if (n > kDiscrepancyMaxN)
        throw limit_error("star_discrepancy_exact: n > 1024 unsupported; use lower-bound mode");
    const std::vector<Axis> axes = build_axes(points, dim, n);
    if (dim == 1) return exact_1d(axes[0], n);
    if (dim == 2) return exact_2d(points, axes, n);
    return exact_3d(points, axes, n);
}

DiscrepancyResult star_discrepancy_lower_bound(std::span<const double> points, int dim,
                                               int trials, std::uint64_t seed) {
    const std::size_t n = point_count(points, dim);
    if (trials < 1) throw config_error("star_discrepancy_lower_bound: trials must be >= 1");
    const std::vector<Axis> axes = build_axes(points, dim, n);

    DiscrepancyResult best{-1.0, DiscrepancyMode::lower_bound, {}};
    std::vector<double> corner(static_cast<std::size_t>(dim));
    std::vector<double> best_corner;
    for (int trial = 0; trial < trials; ++trial) {
        for (int j = 0; j < dim; ++j)
            corner[static_cast<std::size_t>(j)] = unit_double(
                keyed_hash(seed, static_cast<std::uint64_t>(trial),
                           role_word(RandomRole::corner_search, static_cast<std::uint64_t>(j))));
        const double v = local_discrepancy(points, dim, n, corner);
        if (v > best.value) {
            best.value = v;
            best.witness = corner;
        }
    }

    // critical-corner refinement: snap the best corner up to the next point
    // projection (open side) and down to the previous one (closed side)
    best_corner = best.witness;
    std::vector<double> snapped(static_cast<std::size_t>(dim));
    for (const bool up : {true, false}) {
        for (int j = 0; j < dim; ++j) {
            const auto& vals = axes[static_cast<std::size_t>(j)].values;
            const double a = best_corner[static_cast<std::size_t>(j)];
            if (up) {
                const auto it = std::lower_bound(vals.begin(), vals.end(), a);
                snapped[static_cast<std::size_t>(j)] = (it == vals.end()) ? 1.0 : *it;
            } else {
                const auto it = std::upper_bound(vals.begin(), vals.end(), a);
                snapped[static_cast<std::size_t>(j)] = (it == vals.begin()) ? 0.0 : *(it - 1);
            }
        }
        const double v = local_discrepancy(points, dim, n, snapped);
        if (v > best.value) {
            best.value = v;
            best.witness = snapped;
        }
    }
    best.mode = DiscrepancyMode::lower_bound;
    return best;
}

ChiSquareReport uniformity_chi_square(std::span<const double> samples, int cells,
                                      double quantile) {
    if (cells < 2) throw config_error("uniformity_chi_square: need at least 2 cells");
    if (samples.size() < static_cast<std::size_t>(cells) * 50)
        throw config_error("uniformity_chi_square: need at least 50 observations per cell");
    std::vector<std::size_t> obs(static_cast<std::size_t>(cells), 0);
    for (const double x : samples) {
        if (!(x >= 0.0 && x < 1.0))
            throw config_error("uniformity_chi_square: sample outside [0,1)");
        const auto c = std::min<std::size_t>(static_cast<std::size_t>(cells) - 1,
                                             static_cast<std::size_t>(x * cells));
        ++obs[c];
    }
    const double expect = static_cast<double>(samples.size()) / cells;
    double stat = 0.0;
    for (const std::size_t o : obs) {
        const double diff = static_cast<double>(o) - expect;
        stat += diff * diff / expect;
    }
    ChiSquareReport report;
    report.statistic = stat;
    report.cells = static_cast<std::size_t>(cells);
    report.threshold = chi_square_quantile(quantile, static_cast<double>(cells - 1));
    report.accept = stat < report.threshold;
    return report;
}

} // namespace rqmc
