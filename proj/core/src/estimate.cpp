#include "rqmc/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rqmc/rng.hpp"
#include "rqmc/verify.hpp"

namespace rqmc {

namespace {

std::uint64_t checked_pow_u64(int base, int exp) {
    std::uint64_t v = 1;
    for (int i = 0; i < exp; ++i) {
        if (v > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(base))
            throw limit_error("power overflows 64 bits");
        v *= static_cast<std::uint64_t>(base);
    }
    return v;
}

// Number of base-b digits of n >= 1 (L = 1 + floor(log_b n)).
int digit_count(std::uint64_t n, int base) {
    int L = 0;
    while (n > 0) {
        n /= static_cast<std::uint64_t>(base);
        ++L;
    }
    return L;
}

} // namespace

const char* to_string(SamplerKind k) {
    switch (k) {
        case SamplerKind::scrambled_net: return "scrambled-net";
        case SamplerKind::lattice_cp: return "lattice-cp";
        case SamplerKind::plain_mc: return "plain-mc";
    }
    return "?";
}

SamplerKind sampler_kind_from_string(const std::string& s) {
    if (s == "scrambled-net" || s == "net" || s == "sobol") return SamplerKind::scrambled_net;
    if (s == "lattice-cp" || s == "lattice") return SamplerKind::lattice_cp;
    if (s == "plain-mc" || s == "mc") return SamplerKind::plain_mc;
    throw config_error("unknown sampler kind: " + s);
}

Sampler::Sampler(SamplerConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.dim < 1) throw config_error("sampler dimension must be >= 1");
    switch (cfg_.kind) {
        case SamplerKind::scrambled_net:
            if (cfg_.base == 2) {
                if (cfg_.direction_file.empty() && cfg_.dim > 16)
                    throw config_error(
                        "builtin direction table covers dimensions up to 16; "
                        "pass a direction file for more");
                matrices_ = std::make_shared<GeneratorMatrixSet>(
                    cfg_.direction_file.empty()
                        ? default_sobol_matrices(cfg_.dim, cfg_.precision)
                        : sobol_matrices_from_file(cfg_.direction_file, cfg_.dim, cfg_.precision));
            } else {
                matrices_ = std::make_shared<GeneratorMatrixSet>(
                    faure_matrices(cfg_.base, cfg_.dim, cfg_.precision));
            }
            cfg_.precision = matrices_->precision();
            break;
        case SamplerKind::lattice_cp:
            if (cfg_.korobov_a == 0)
                throw config_error("lattice sampler needs a nonzero Korobov multiplier");
            break;
        case SamplerKind::plain_mc:
            break;
    }
}

namespace {

ScrambleSpec net_spec(const SamplerConfig& cfg, int depth, std::uint64_t seed,
                      std::uint64_t replicate) {
    ScrambleSpec spec;
    spec.kind = cfg.scramble;
    spec.base = cfg.base;
    spec.dim = cfg.dim;
    spec.depth = depth;
    spec.seed = seed;
    spec.replicate = replicate;
    return spec;
}

void mc_point(const SamplerConfig& cfg, std::uint64_t i, std::uint64_t seed,
              std::uint64_t replicate, double* out) {
    for (int j = 0; j < cfg.dim; ++j) {
        out[j] = unit_double(keyed_hash(seed, replicate,
                                        role_word(RandomRole::mc_point, static_cast<std::uint64_t>(j)), i));
    }
}

} // namespace

double Sampler::estimate(const Integrand& f, std::uint64_t n, std::uint64_t seed,
                         std::uint64_t replicate) const {
    if (n < 1) throw config_error("sample size must be >= 1");
    if (f.dim() != cfg_.dim) throw config_error("integrand dimension does not match the sampler");
    std::vector<double> x(static_cast<std::size_t>(cfg_.dim));
    double sum = 0.0;
    switch (cfg_.kind) {
        case SamplerKind::scrambled_net: {
            ScrambledStream stream(*matrices_, net_spec(cfg_, matrices_->precision(), seed, replicate));
            for (std::uint64_t i = 0; i < n; ++i) {
                stream.next(x.data());
                sum += f(x);
            }
            break;
        }
        case SamplerKind::lattice_cp: {
            LatticeRule rule = korobov_rule(n, cfg_.korobov_a, cfg_.dim);
            std::vector<double> pts = cranley_patterson(lattice_points(rule),
                                                        rotation_shift(cfg_.dim, seed, replicate));
            for (std::uint64_t i = 0; i < n; ++i) {
                std::span<const double> xi(pts.data() + i * static_cast<std::size_t>(cfg_.dim),
                                           static_cast<std::size_t>(cfg_.dim));
                sum += f(xi);
            }
            break;
        }
        case SamplerKind::plain_mc: {
            for (std::uint64_t i = 0; i < n; ++i) {
                mc_point(cfg_, i, seed, replicate, x.data());
                sum += f(x);
            }
            break;
        }
    }
    return sum / static_cast<double>(n);
}

std::vector<double> Sampler::running_estimates(const Integrand& f, std::span<const std::uint64_t> ns,
                                               std::uint64_t seed, std::uint64_t replicate) const {
    if (!extensible())
        throw config_error("running estimates need an extensible sampler; lattice rules are tied to one n");
    if (ns.empty()) throw config_error("empty sample-size list");
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < 1 || (i > 0 && ns[i] <= ns[i - 1]))
            throw config_error("sample sizes must be positive and strictly increasing");
    }
    if (f.dim() != cfg_.dim) throw config_error("integrand dimension does not match the sampler");

    std::optional<ScrambledStream> stream;
    if (cfg_.kind == SamplerKind::scrambled_net)
        stream.emplace(*matrices_, net_spec(cfg_, matrices_->precision(), seed, replicate));

    std::vector<double> x(static_cast<std::size_t>(cfg_.dim));
    std::vector<double> out;
    out.reserve(ns.size());
    double sum = 0.0;
    std::uint64_t i = 0;
    for (std::uint64_t target : ns) {
        while (i < target) {
            if (stream) stream->next(x.data());
            else mc_point(cfg_, i, seed, replicate, x.data());
            sum += f(x);
            ++i;
        }
        out.push_back(sum / static_cast<double>(target));
    }
    return out;
}

void Sampler::point_at(std::uint64_t i, std::uint64_t seed, std::uint64_t replicate,
                       double* out) const {
    switch (cfg_.kind) {
        case SamplerKind::scrambled_net: {
            ScrambledStream stream(*matrices_, net_spec(cfg_, matrices_->precision(), seed, replicate));
            stream.point_at(i, out);
            break;
        }
        case SamplerKind::plain_mc:
            mc_point(cfg_, i, seed, replicate, out);
            break;
        case SamplerKind::lattice_cp:
            throw config_error("lattice points depend on n; use lattice_points directly");
    }
}

int Sampler::block_t(int m, int r) const {
    if (cfg_.kind != SamplerKind::scrambled_net)
        throw config_error("block t-values are defined for net samplers only");
    if (m < 0 || r < 1) throw config_error("need m >= 0 and r >= 1");
    if (block_t_cache_.size() <= static_cast<std::size_t>(m))
        block_t_cache_.resize(static_cast<std::size_t>(m) + 1);
    auto& row = block_t_cache_[static_cast<std::size_t>(m)];
    while (row.size() < static_cast<std::size_t>(r)) {
        std::uint64_t count = checked_pow_u64(cfg_.base, m);
        std::uint64_t start = count * static_cast<std::uint64_t>(row.size());
        DigitalPointSet block = generate_points(*matrices_, start, count);
        row.push_back(exact_t(block, m));
    }
    return row[static_cast<std::size_t>(r) - 1];
}

double rqmc_estimate(const Sampler& sampler, const Integrand& f, std::uint64_t n,
                     std::uint64_t seed, std::uint64_t replicate) {
    return sampler.estimate(f, n, seed, replicate);
}

ReplicateStats replicate_variance(const Sampler& sampler, const Integrand& f, std::uint64_t n,
                                  int replicates, std::uint64_t seed, int workers, double p) {
    if (replicates < 2) throw config_error("need at least 2 replicates");
    ReplicateStats st;
    st.estimates.assign(static_cast<std::size_t>(replicates), 0.0);
    parallel_for_index(static_cast<std::size_t>(replicates), workers, [&](std::size_t r) {
        st.estimates[r] = sampler.estimate(f, n, seed, static_cast<std::uint64_t>(r));
    });
    double sum = 0.0;
    for (double e : st.estimates) sum += e;
    st.mean = sum / replicates;
    double ss = 0.0;
    for (double e : st.estimates) ss += (e - st.mean) * (e - st.mean);
    st.variance = ss / (replicates - 1);
    if (p > 0.0) {
        std::optional<double> mu = f.mean();
        if (!mu) throw config_error("p-moment needs an integrand with a closed-form mean");
        double ms = 0.0;
        for (double e : st.estimates) ms += std::pow(std::abs(e - *mu), p);
        st.p_moment = ms / replicates;
    }
    return st;
}

double gamma_bound(int base, int t, int dim) {
    if (base < 2 || t < 0 || dim < 1) throw config_error("need b >= 2, t >= 0, d >= 1");
    double b = static_cast<double>(base);
    double best = std::pow(b, t) * std::pow((b + 1.0) / (b - 1.0), dim);
    if (t == 0) best = std::min(best, std::pow(b / (b - 1.0), dim));
    if (dim == 1) best = std::min(best, std::pow(b, t));
    return best;
}

double chebychev_tail(double eps, std::uint64_t n, int r, double gamma, double sigma2) {
    if (eps <= 0.0) throw config_error("threshold must be positive");
    if (n < 1 || r < 1 || gamma < 0.0 || sigma2 < 0.0) throw config_error("invalid tail-bound inputs");
    double bound = r * gamma * sigma2 / (static_cast<double>(n) * eps * eps);
    return std::min(1.0, bound);
}

double p_moment_bound(std::uint64_t n, int r, double gamma, double p, double pnorm_pth_power) {
    if (!(p > 1.0 && p < 2.0)) throw config_error("moment order must lie in (1, 2)");
    if (n < 1 || r < 1 || gamma < 0.0 || pnorm_pth_power < 0.0)
        throw config_error("invalid moment-bound inputs");
    return std::pow(2.0, 2.0 - p) *
           std::pow(static_cast<double>(r) * gamma / static_cast<double>(n), p - 1.0) *
           pnorm_pth_power;
}

std::vector<std::uint64_t> schedule(int R, int base, std::uint64_t n_max) {
    if (R < 1) throw config_error("R must be >= 1");
    if (base < 2) throw config_error("base must be >= 2");
    std::vector<std::uint64_t> out;
    for (std::uint64_t pm = 1; pm <= n_max; ) {
        for (std::uint64_t r = 1; r <= static_cast<std::uint64_t>(R); ++r) {
            if (r > n_max / pm) break;
            out.push_back(r * pm);
        }
        if (pm > n_max / static_cast<std::uint64_t>(base)) break;
        pm *= static_cast<std::uint64_t>(base);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

// R must be b^k with k > 1; returns k.
int bracket_exponent(int R, int base) {
    if (base < 2) throw config_error("base must be >= 2");
    int k = 0;
    int v = R;
    while (v > 1 && v % base == 0) {
        v /= base;
        ++k;
    }
    if (v != 1 || k < 2) throw config_error("bracketing needs R = b^k with k > 1");
    return k;
}

} // namespace

Bracket bracket(std::uint64_t n, int R, int base) {
    int k = bracket_exponent(R, base);
    if (n < 1) throw config_error("n must be >= 1");
    int L = digit_count(n, base);
    if (L <= k) return {n, n};
    std::uint64_t scale = checked_pow_u64(base, L - k);  // keep the top k digits
    std::uint64_t tail = n % scale;
    std::uint64_t head = n - tail;
    if (tail == 0) return {n, n};
    return {head, head + scale};
}

double bracket_ratio_bound(std::uint64_t n, int R, int base) {
    int k = bracket_exponent(R, base);
    if (n < 1) throw config_error("n must be >= 1");
    int L = digit_count(n, base);
    double bL = power_double(base, L);
    return bL / (power_double(base, L - k + 1) + bL);
}

SllnReport slln_study(const SllnConfig& cfg) {
    if (cfg.sampler.kind == SamplerKind::lattice_cp)
        throw config_error("the schedule study needs an extensible sampler; lattice rules are tied to one n");
    if (cfg.seeds < 1) throw config_error("need at least one seed");
    Sampler sampler(cfg.sampler);
    Integrand f = make_integrand(cfg.integrand, sampler.dim(), cfg.params);
    if (!f.mean()) throw config_error("the schedule study needs an integrand with a closed-form mean");

    SllnReport rep;
    rep.ns = schedule(cfg.R, sampler.base(), cfg.n_max);
    rep.mu = f.mean();
    rep.estimates.assign(static_cast<std::size_t>(cfg.seeds), {});
    parallel_for_index(static_cast<std::size_t>(cfg.seeds), cfg.workers, [&](std::size_t s) {
        rep.estimates[s] = sampler.running_estimates(f, rep.ns, cfg.master_seed,
                                                     static_cast<std::uint64_t>(s));
    });

    std::size_t cols = rep.ns.size();
    rep.err_median.resize(cols);
    rep.err_q90.resize(cols);
    rep.err_max.resize(cols);
    std::vector<double> errs(static_cast<std::size_t>(cfg.seeds));
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t s = 0; s < errs.size(); ++s)
            errs[s] = std::abs(rep.estimates[s][c] - *rep.mu);
        std::sort(errs.begin(), errs.end());
        auto rank = [&](double q) {
            std::size_t idx = static_cast<std::size_t>(std::ceil(q * errs.size()));
            return errs[idx == 0 ? 0 : idx - 1];
        };
        rep.err_median[c] = rank(0.5);
        rep.err_q90[c] = rank(0.9);
        rep.err_max[c] = errs.back();
    }
    return rep;
}

ConvergenceReport converge_study(const Sampler& sampler, const Integrand& f,
                                 const StudyConfig& cfg) {
    if (cfg.m_min < 0 || cfg.m_max < cfg.m_min) throw config_error("need 0 <= m_min <= m_max");
    if (cfg.R < 1) throw config_error("R must be >= 1");
    if (cfg.replicates < 2) throw config_error("need at least 2 replicates");
    if (cfg.p_replicates < 2) throw config_error("need at least 2 moment replicates");
    if (!(cfg.p > 1.0 && cfg.p < 2.0)) throw config_error("moment order must lie in (1, 2)");
    if (cfg.eps <= 0.0) throw config_error("tail threshold must be positive");
    if (f.dim() != sampler.dim()) throw config_error("integrand dimension does not match the sampler");

    int b = sampler.base();
    // Rows are the schedule sizes inside [b^m_min, b^m_max]. Each n keeps the
    // representation n = r b^m with the largest m so duplicate sizes
    // (r divisible by b) use the fewest blocks.
    std::uint64_t n_lo = checked_pow_u64(b, cfg.m_min);
    std::uint64_t n_hi = checked_pow_u64(b, cfg.m_max);
    std::map<std::uint64_t, std::pair<int, int>> sizes;
    for (int m = 0; m <= cfg.m_max; ++m) {
        std::uint64_t pm = checked_pow_u64(b, m);
        for (int r = 1; r <= cfg.R; ++r) {
            std::uint64_t n = pm * static_cast<std::uint64_t>(r);
            if (n < n_lo || n > n_hi) continue;
            auto it = sizes.find(n);
            if (it == sizes.end() || m > it->second.second) sizes[n] = {r, m};
        }
    }

    ConvergenceReport rep;
    rep.base = b;
    rep.p = cfg.p;
    rep.eps = cfg.eps;
    std::optional<double> mu = f.mean();
    std::optional<double> sigma2 = f.variance();
    NormClosedForm norm = f.closed_p_norm(cfg.p);
    bool is_net = sampler.config().kind == SamplerKind::scrambled_net;

    for (const auto& [n, rm] : sizes) {
        auto [r, m] = rm;
        ConvergenceRow row;
        row.n = n;
        row.r = r;
        row.m = m;
        ReplicateStats st = replicate_variance(sampler, f, n, cfg.replicates, cfg.seed, cfg.workers);
        row.mean = st.mean;
        row.var = st.variance;
        if (mu) {
            double ss = 0.0;
            for (double e : st.estimates) ss += (e - *mu) * (e - *mu);
            row.rmse = std::sqrt(ss / st.estimates.size());
            std::size_t pr = std::min<std::size_t>(cfg.p_replicates, st.estimates.size());
            double ms = 0.0;
            for (std::size_t i = 0; i < pr; ++i)
                ms += std::pow(std::abs(st.estimates[i] - *mu), cfg.p);
            row.p_moment = ms / static_cast<double>(pr);
        }
        if (sigma2) row.mc_var = *sigma2 / static_cast<double>(n);
        if (is_net) {
            int t = 0;
            for (int q = 1; q <= r; ++q) t = std::max(t, sampler.block_t(m, q));
            double gamma = gamma_bound(b, t, sampler.dim());
            if (sigma2) {
                row.gamma_bound_var = r * gamma * *sigma2 / static_cast<double>(n);
                row.chebychev_tail = chebychev_tail(cfg.eps, n, r, gamma, *sigma2);
            }
            if (norm.available && !norm.diverged)
                row.p_moment_bound = p_moment_bound(n, r, gamma, cfg.p, norm.pth_power);
        }
        rep.rows.push_back(row);
    }
    return rep;
}

SlopeFit fit_log_slope(std::span<const double> n, std::span<const double> y) {
    if (n.size() != y.size() || n.size() < 2) throw config_error("need >= 2 points to fit a slope");
    std::size_t k = n.size();
    std::vector<double> xs(k), ys(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (n[i] <= 0.0 || y[i] <= 0.0) throw config_error("log-log fit needs positive inputs");
        xs[i] = std::log(n[i]);
        ys[i] = std::log(y[i]);
    }
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= k;
    ybar /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (sxx == 0.0) throw config_error("slope fit needs at least two distinct n");
    SlopeFit fit;
    fit.points = static_cast<int>(k);
    fit.slope = sxy / sxx;
    if (k > 2) {
        double sse = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double resid = ys[i] - ybar - fit.slope * (xs[i] - xbar);
            sse += resid * resid;
        }
        fit.stderr_ = std::sqrt(sse / (k - 2) / sxx);
    }
    return fit;
}

SlopeFit rmse_slope(const ConvergenceReport& report, int m_min, int m_max) {
    std::vector<double> ns, rmses;
    for (const ConvergenceRow& row : report.rows) {
        if (row.r != 1 || row.m < m_min || row.m > m_max) continue;
        if (!std::isfinite(row.rmse) || row.rmse <= 0.0) continue;
        ns.push_back(static_cast<double>(row.n));
        rmses.push_back(row.rmse);
    }
    if (ns.size() < 4)
        throw config_error("slope fit needs at least 4 rows with n = b^m and a finite rmse");
    return fit_log_slope(ns, rmses);
}

void parallel_for_index(std::size_t count, int workers,
                        const std::function<void(std::size_t)>& fn) {
    if (workers < 1) throw config_error("worker count must be >= 1");
    std::size_t threads = std::min<std::size_t>(workers, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto body = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(body);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace rqmc
