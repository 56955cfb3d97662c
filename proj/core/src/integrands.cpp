#include "rqmc/integrands.hpp"

#include <cassert>
#include <cmath>

namespace rqmc {

NormClosedForm Integrand::closed_p_norm(double p) const {
    if (p < 1.0) throw config_error("closed_p_norm: p must be >= 1");
    if (!norm_) return {};
    return norm_(p);
}

namespace {

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    std::initializer_list<const char*> known, const std::string& id) {
    for (const auto& [key, value] : params) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw config_error("integrand " + id + ": unknown parameter '" + key + "'");
    }
}

double factorial(int d) {
    double f = 1.0;
    for (int i = 2; i <= d; ++i) f *= i;
    return f;
}

} // namespace

std::vector<std::string> builtin_integrand_ids() {
    return {"centered_product", "smooth_product", "simplex_indicator", "kink",
            "corner_singularity"};
}

Integrand make_integrand(const std::string& id, int dim,
                         const std::map<std::string, double>& params) {
    if (dim < 1) throw config_error("make_integrand: dim must be >= 1");
    Integrand f;
    f.id_ = id;
    f.dim_ = dim;
    f.params_ = params;
    const double inf = std::numeric_limits<double>::infinity();

    if (id == "centered_product") {
        reject_unknown(params, {}, id);
        f.eval_ = [](std::span<const double> x) {
            double v = 1.0;
            for (const double xi : x) v *= xi - 0.5;
            return v;
        };
        f.mean_ = 0.0;
        f.variance_ = std::pow(1.0 / 12.0, dim);
        f.norm_ = [dim](double p) {
            return NormClosedForm{true, false,
                                  std::pow(std::pow(0.5, p) / (p + 1.0), dim)};
        };
        f.in_bvhk_ = true;
        f.riemann_ = true;
    } else if (id == "smooth_product") {
        reject_unknown(params, {"c"}, id);
        const double c = get_param(params, "c", 1.0);
        if (!(c > 0.0 && c <= 1.0)) throw config_error("smooth_product: need c in (0,1]");
        f.params_["c"] = c;
        f.eval_ = [c](std::span<const double> x) {
            double v = 1.0;
            for (const double xi : x) v *= 1.0 + c * (xi - 0.5);
            return v;
        };
        f.mean_ = 1.0;
        f.variance_ = std::pow(1.0 + c * c / 12.0, dim) - 1.0;
        f.norm_ = [dim, c](double p) {
            const double hi = std::pow(1.0 + 0.5 * c, p + 1.0);
            const double lo = std::pow(1.0 - 0.5 * c, p + 1.0);
            return NormClosedForm{true, false, std::pow((hi - lo) / (c * (p + 1.0)), dim)};
        };
        f.in_bvhk_ = true;
        f.riemann_ = true;
    } else if (id == "simplex_indicator") {
        reject_unknown(params, {}, id);
        f.eval_ = [](std::span<const double> x) {
            double s = 0.0;
            for (const double xi : x) s += xi;
            return s <= 1.0 ? 1.0 : 0.0;  // boundary included
        };
        const double mu = 1.0 / factorial(dim);
        f.mean_ = mu;
        f.variance_ = mu * (1.0 - mu);
        f.norm_ = [mu](double) { return NormClosedForm{true, false, mu}; };
        // the diagonal jump has unbounded mixed variation beyond one dimension
        f.in_bvhk_ = (dim == 1);
        f.riemann_ = true;
    } else if (id == "kink") {
        reject_unknown(params, {}, id);
        if (dim != 2) throw config_error("kink: defined for dim 2 only");
        f.eval_ = [](std::span<const double> x) {
            return std::max(x[0] + x[1] - 1.0, 0.0);
        };
        f.mean_ = 1.0 / 6.0;
        f.variance_ = 1.0 / 18.0;  // E f^2 = 1/12
        f.norm_ = [](double p) {
            return NormClosedForm{true, false, 1.0 / ((p + 1.0) * (p + 2.0))};
        };
        // continuous with a kink along the diagonal; the mixed derivative is an
        // indicator, so the variation is finite even though f is not smooth
        f.in_bvhk_ = true;
        f.riemann_ = true;
    } else if (id == "corner_singularity") {
        reject_unknown(params, {"alpha", "eps"}, id);
        const double alpha = get_param(params, "alpha", 0.6);
        const double eps = get_param(params, "eps", 0x1.0p-32);
        if (!(alpha > 0.0 && alpha < 1.0))
            throw config_error("corner_singularity: need alpha in (0,1)");
        if (!(eps > 0.0 && eps < 1.0))
            throw config_error("corner_singularity: need eps in (0,1)");
        f.params_["alpha"] = alpha;
        f.params_["eps"] = eps;
        f.eval_ = [alpha, eps](std::span<const double> x) {
            const double x1 = (x[0] == 0.0) ? eps : x[0];  // surrogate at the locus
            return std::pow(x1, -alpha);
        };
        f.mean_ = 1.0 / (1.0 - alpha);
        if (alpha < 0.5)
            f.variance_ = 1.0 / (1.0 - 2.0 * alpha) - 1.0 / ((1.0 - alpha) * (1.0 - alpha));
        f.norm_ = [alpha](double p) {
            if (p * alpha >= 1.0)
                return NormClosedForm{true, true, std::numeric_limits<double>::infinity()};
            return NormClosedForm{true, false, 1.0 / (1.0 - p * alpha)};
        };
        f.p_star_ = 1.0 / alpha;
        f.in_bvhk_ = false;
        f.riemann_ = false;  // unbounded near the corner
    } else {
        throw config_error("unknown integrand: " + id);
    }
    assert(!f.in_bvhk_ || f.riemann_);
    return f;
}

PNormEstimate numeric_p_norm(const Integrand& f, double p, std::uint64_t budget) {
    if (p < 1.0) throw config_error("numeric_p_norm: p must be >= 1");
    if (budget < 16) throw config_error("numeric_p_norm: budget too small");
    const int d = f.dim();

    PNormEstimate out;
    if (p >= f.p_star()) {
        out.diverged = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }

    double prev = -1.0, prev2 = -1.0;
    std::vector<double> x(static_cast<std::size_t>(d));
    std::vector<std::uint64_t> idx(static_cast<std::size_t>(d));
    for (int level = 1;; ++level) {
        const std::uint64_t g = 1ull << level;
        double cells = 1.0;
        for (int j = 0; j < d; ++j) cells *= static_cast<double>(g);
        if (cells > static_cast<double>(budget)) break;

        // midpoint rule on the g^d tensor grid
        std::fill(idx.begin(), idx.end(), 0);
        double sum = 0.0;
        const double h = 1.0 / static_cast<double>(g);
        while (true) {
            for (int j = 0; j < d; ++j)
                x[static_cast<std::size_t>(j)] =
                    (static_cast<double>(idx[static_cast<std::size_t>(j)]) + 0.5) * h;
            sum += std::pow(std::fabs(f(x)), p);
            int j = 0;
            while (j < d && ++idx[static_cast<std::size_t>(j)] == g) {
                idx[static_cast<std::size_t>(j)] = 0;
                ++j;
            }
            if (j == d) break;
        }
        const double integral = sum / cells;
        const double norm = std::pow(integral, 1.0 / p);
        if (prev >= 0.0) {
            out.half_width = std::fabs(norm - prev);
            // successive refinements still growing geometrically: treat as divergent
            if (prev2 > 0.0 && prev > 0.0 && norm / prev > 1.5 && prev / prev2 > 1.5) {
                out.diverged = true;
                out.value = norm;
                return out;
            }
        }
        prev2 = prev;
        prev = norm;
        out.value = norm;
    }
    return out;
}

} // namespace rqmc
