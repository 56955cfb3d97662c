#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rqmc/errors.hpp"

namespace rqmc {

// Closed-form integral of |f|^p, when one exists.
struct NormClosedForm {
    bool available = false;
    bool diverged = false;
    double pth_power = 0.0;
};

// Test integrand with analytic reference values and integrability flags.
class Integrand {
public:
    const std::string& id() const { return id_; }
    int dim() const { return dim_; }
    const std::map<std::string, double>& params() const { return params_; }

    double operator()(std::span<const double> x) const { return eval_(x); }

    std::optional<double> mean() const { return mean_; }
    std::optional<double> variance() const { return variance_; }
    // integral of |f|^p in closed form; diverged when p >= p_star
    NormClosedForm closed_p_norm(double p) const;

    // f is in L^p exactly for p < p_star (infinity when f is bounded)
    double p_star() const { return p_star_; }
    bool in_l2() const { return p_star_ > 2.0; }
    bool in_bvhk() const { return in_bvhk_; }
    bool riemann_integrable() const { return riemann_; }

private:
    friend Integrand make_integrand(const std::string&, int,
                                    const std::map<std::string, double>&);
    std::string id_;
    int dim_ = 1;
    std::map<std::string, double> params_;
    std::function<double(std::span<const double>)> eval_;
    std::optional<double> mean_;
    std::optional<double> variance_;
    std::function<NormClosedForm(double)> norm_;
    double p_star_ = std::numeric_limits<double>::infinity();
    bool in_bvhk_ = false;
    bool riemann_ = false;
};

// Builtin family identifiers:
//   centered_product    prod_j (x_j - 1/2)
//   smooth_product      prod_j (1 + c (x_j - 1/2)),    param c in (0,1]
//   simplex_indicator   1{sum_j x_j <= 1}
//   kink                max(x_1 + x_2 - 1, 0), dim 2 only
//   corner_singularity  x_1^-alpha,                    params alpha in (0,1), eps
// The singular evaluator substitutes x_1 = eps (default 2^-32) exactly at the
// singular locus x_1 = 0.
std::vector<std::string> builtin_integrand_ids();
Integrand make_integrand(const std::string& id, int dim,
                         const std::map<std::string, double>& params = {});

struct PNormEstimate {
    double value = 0.0;       // estimate of ||f||_p
    double half_width = 0.0;  // spread of the last two refinements
    bool diverged = false;
};

// Deterministic midpoint tensor-grid estimate of ||f||_p, refining until the
// evaluation budget is exhausted. Flags divergence when p >= p_star or the
// refinements keep growing.
PNormEstimate numeric_p_norm(const Integrand& f, double p, std::uint64_t budget = 1u << 22);

} // namespace rqmc
