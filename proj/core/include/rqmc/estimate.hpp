#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rqmc/integrands.hpp"
#include "rqmc/lattice.hpp"
#include "rqmc/netgen.hpp"
#include "rqmc/scramble.hpp"

namespace rqmc {

enum class SamplerKind { scrambled_net, lattice_cp, plain_mc };

const char* to_string(SamplerKind k);
SamplerKind sampler_kind_from_string(const std::string& s);

struct SamplerConfig {
    SamplerKind kind = SamplerKind::scrambled_net;
    int base = 2;
    int dim = 1;
    int precision = 0;  // 0 selects the base default
    ScrambleKind scramble = ScrambleKind::nested_uniform;
    // Net source: base 2 reads a Joe-Kuo direction table (empty = builtin);
    // other prime bases use the Faure construction.
    std::string direction_file;
    // Korobov multiplier for lattice_cp rules.
    std::uint64_t korobov_a = 0;
};

// Point source for one (seed, replicate) pair. All sampler kinds draw their
// randomness from the shared counter-based source, so any point of any
// replicate can be recomputed independently.
class Sampler {
public:
    explicit Sampler(SamplerConfig cfg);

    const SamplerConfig& config() const { return cfg_; }
    int dim() const { return cfg_.dim; }
    int base() const { return cfg_.base; }
    // Streams over a digital sequence extend prefix-consistently; a lattice
    // rule is tied to one fixed n.
    bool extensible() const { return cfg_.kind != SamplerKind::lattice_cp; }
    const GeneratorMatrixSet* matrices() const { return matrices_.get(); }

    // Mean of f over the first n points of replicate (seed, replicate).
    double estimate(const Integrand& f, std::uint64_t n, std::uint64_t seed,
                    std::uint64_t replicate) const;

    // Running means of one prefix-consistent stream, evaluated at each n in
    // ns (ascending). Rejects non-extensible samplers.
    std::vector<double> running_estimates(const Integrand& f, std::span<const std::uint64_t> ns,
                                          std::uint64_t seed, std::uint64_t replicate) const;

    // Coordinates of point i of the given replicate (net and mc kinds).
    void point_at(std::uint64_t i, std::uint64_t seed, std::uint64_t replicate,
                  double* out) const;

    // Exact t of the r-th block of b^m points (cached); the Gamma factor for
    // n = r b^m uses the worst block seen.
    int block_t(int m, int r) const;

private:
    SamplerConfig cfg_;
    std::shared_ptr<GeneratorMatrixSet> matrices_;
    mutable std::vector<std::vector<int>> block_t_cache_;  // [m][r-1]
};

// Mean of f over the first n points (thin wrapper over Sampler::estimate).
double rqmc_estimate(const Sampler& sampler, const Integrand& f, std::uint64_t n,
                     std::uint64_t seed, std::uint64_t replicate);

struct ReplicateStats {
    double mean = 0.0;
    double variance = 0.0;  // unbiased across replicates
    double p_moment = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> estimates;
};

// Runs `replicates` independent replicates (ids 0..R-1). Deterministic for a
// given seed regardless of worker count: replicate r always lands in slot r
// and reductions run in slot order. With p > 0 the mean of |estimate - mu|^p
// is filled in too, which needs the integrand's closed-form mean.
ReplicateStats replicate_variance(const Sampler& sampler, const Integrand& f, std::uint64_t n,
                                  int replicates, std::uint64_t seed, int workers = 1,
                                  double p = 0.0);

// Least applicable variance-inflation factor for a scrambled (t,m,d)-net in
// base b: b^t ((b+1)/(b-1))^d generally, (b/(b-1))^d when t = 0, b^t in one
// dimension.
double gamma_bound(int base, int t, int dim);

// min(1, r Gamma sigma^2 / (n eps^2)): tail probability of |mean - mu| >= eps
// for n = r b^m scrambled-net points.
double chebychev_tail(double eps, std::uint64_t n, int r, double gamma, double sigma2);

// 2^(2-p) (r Gamma / n)^(p-1) ||f||_p^p for 1 < p < 2.
double p_moment_bound(std::uint64_t n, int r, double gamma, double p, double pnorm_pth_power);

// Sample sizes {r b^m : 1 <= r <= R, m >= 0, r b^m <= n_max}, ascending.
std::vector<std::uint64_t> schedule(int R, int base, std::uint64_t n_max);

struct Bracket {
    std::uint64_t lower = 0;
    std::uint64_t upper = 0;
};

// Nearest schedule sizes around n for R = b^k (k >= 2), from the base-b
// expansion of n: keep the top k digits for the lower bracket, round them up
// for the upper one.
Bracket bracket(std::uint64_t n, int R, int base);

// Guaranteed floor for lower/n when n > R: b^L / (b^(L-k+1) + b^L) with
// L = 1 + floor(log_b n).
double bracket_ratio_bound(std::uint64_t n, int R, int base);

struct SllnConfig {
    SamplerConfig sampler;
    std::string integrand;
    std::map<std::string, double> params;
    int R = 3;
    std::uint64_t n_max = 1u << 16;
    int seeds = 100;
    std::uint64_t master_seed = 1;
    int workers = 1;
};

struct SllnReport {
    std::vector<std::uint64_t> ns;               // schedule
    std::vector<std::vector<double>> estimates;  // [seed][schedule index]
    std::optional<double> mu;
    // per-schedule-index quantiles of |estimate - mu| across seeds
    std::vector<double> err_median, err_q90, err_max;
};

// Follows one prefix-consistent stream per seed and records the estimate at
// every schedule size.
SllnReport slln_study(const SllnConfig& cfg);

struct StudyConfig {
    int m_min = 4;
    int m_max = 10;
    int R = 1;              // include r b^m rows up to this r
    int replicates = 2000;
    int p_replicates = 500;
    std::uint64_t seed = 1;
    double p = 1.5;         // moment order for the p-moment columns
    double eps = 0.1;       // threshold for the tail-bound column
    int workers = 1;
};

struct ConvergenceRow {
    std::uint64_t n = 0;
    int r = 1;  // n = r b^m
    int m = 0;
    double mean = 0.0;
    double var = 0.0;
    double rmse = std::numeric_limits<double>::quiet_NaN();
    double p_moment = std::numeric_limits<double>::quiet_NaN();
    double gamma_bound_var = std::numeric_limits<double>::quiet_NaN();
    double chebychev_tail = std::numeric_limits<double>::quiet_NaN();
    double p_moment_bound = std::numeric_limits<double>::quiet_NaN();
    double mc_var = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;  // sorted by n, strictly increasing
    int base = 2;
    double p = 1.5;
    double eps = 0.1;
};

// Replicated estimates at every schedule size in [b^m_min, b^m_max], with
// the matching variance/tail/moment bound columns where analytic inputs
// exist (columns without inputs stay NaN and print empty).
ConvergenceReport converge_study(const Sampler& sampler, const Integrand& f,
                                 const StudyConfig& cfg);

struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    int points = 0;
};

// Least-squares slope of log(rmse) against log(n), restricted to rows with
// n = b^m and m in [m_min, m_max]. Requires at least 4 such rows.
SlopeFit rmse_slope(const ConvergenceReport& report, int m_min, int m_max);
SlopeFit fit_log_slope(std::span<const double> n, std::span<const double> y);

// Runs fn(0..count-1) on `workers` threads; each index writes only its own
// slot, keeping outputs bit-identical for any worker count.
void parallel_for_index(std::size_t count, int workers,
                        const std::function<void(std::size_t)>& fn);

} // namespace rqmc
