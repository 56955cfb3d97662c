#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rqmc/netgen.hpp"
#include "rqmc/scramble.hpp"

namespace rqmc {

// First unbalanced elementary interval found by a net check.
struct IntervalWitness {
    std::vector<int> k;
    std::vector<std::uint64_t> c;
    std::uint64_t observed = 0;
    std::uint64_t required = 0;
};

struct NetCheckReport {
    int m = 0;
    int t = 0;
    bool pass = false;
    std::uint64_t shapes_checked = 0;
    std::optional<IntervalWitness> witness;
};

// Verifies the net property for parameters (t, m): every elementary interval
// with |k| <= m - t must contain exactly b^(m-|k|) of the b^m points.
// Counting is radix counting over the stored digits; no float compares.
NetCheckReport check_net(const DigitalPointSet& pts, int t, int m);

// Least t for which check_net passes, found by verifying equidistribution
// level by level from |k| = 0 upward (equivalently, descending candidate t
// from m, failing out of the cheap shapes first).
int exact_t(const DigitalPointSet& pts, int m);

struct SequenceCheckReport {
    bool pass = true;
    int fail_m = -1;
    std::uint64_t fail_r = 0;
    std::optional<IntervalWitness> witness;
};

// Checks every block [(r-1)b^m, r b^m) for t <= m <= m_max, 1 <= r <= r_max
// against the net property, optionally after scrambling the stream.
SequenceCheckReport check_sequence(const GeneratorMatrixSet& g,
                                   const std::optional<ScrambleSpec>& scramble, int t, int m_max,
                                   int r_max);

enum class DiscrepancyMode { exact, lower_bound };

struct DiscrepancyResult {
    double value = 0.0;
    DiscrepancyMode mode = DiscrepancyMode::exact;
    std::vector<double> witness;  // corner attaining (or bounding) the sup
};

// Exact star discrepancy via the critical-corner grid (candidate coordinates
// are the point projections plus 1), evaluating both the open-box deficit and
// the closed-box excess at every corner. Limits: dim <= 3, n <= 1024.
DiscrepancyResult star_discrepancy_exact(std::span<const double> points, int dim);

// Randomized corner search plus critical-corner refinement of the best
// candidate. Never exceeds the exact value.
DiscrepancyResult star_discrepancy_lower_bound(std::span<const double> points, int dim,
                                               int trials, std::uint64_t seed);

struct ChiSquareReport {
    double statistic = 0.0;
    double threshold = 0.0;
    std::size_t cells = 0;
    bool accept = false;
};

// Chi-square goodness of fit of scalar samples against uniform cells on
// [0,1). Requires at least 50 observations per cell.
ChiSquareReport uniformity_chi_square(std::span<const double> samples, int cells,
                                      double quantile = 0.999);

} // namespace rqmc
