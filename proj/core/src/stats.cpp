#include "rqmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rqmc/errors.hpp"

namespace rqmc {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw config_error("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

namespace {

// series expansion of P(a,x), valid for x < a+1
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// continued fraction for Q(a,x), valid for x >= a+1
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw config_error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi_square_cdf(double x, double dof) {
    if (x <= 0.0) return 0.0;
    return gamma_p(dof / 2.0, x / 2.0);
}

double chi_square_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw config_error("chi_square_quantile: p must be in (0,1)");
    if (dof < 1.0) throw config_error("chi_square_quantile: dof must be >= 1");
    // Wilson-Hilferty start
    const double z = normal_quantile(p);
    const double f = 2.0 / (9.0 * dof);
    double x = dof * std::pow(1.0 - f + z * std::sqrt(f), 3.0);
    if (x <= 0.0) x = 0.5;
    for (int it = 0; it < 40; ++it) {
        const double cdf = chi_square_cdf(x, dof);
        const double pdf = std::exp((dof / 2.0 - 1.0) * std::log(x) - x / 2.0 -
                                    (dof / 2.0) * std::log(2.0) - std::lgamma(dof / 2.0));
        if (pdf <= 0.0) break;
        const double step = (cdf - p) / pdf;
        x -= step;
        if (x <= 0.0) x = 1e-8;
        if (std::fabs(step) < 1e-10 * (1.0 + x)) break;
    }
    return x;
}

double ks_statistic_uniform(std::span<const double> samples) {
    if (samples.empty()) throw config_error("ks_statistic_uniform: empty sample");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const auto n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double lo = s[i] - static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n - s[i];
        d = std::max({d, lo, hi});
    }
    return d;
}

double ks_critical_uniform(std::size_t n, double alpha) {
    if (n == 0) throw config_error("ks_critical_uniform: n must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw config_error("ks_critical_uniform: alpha must be in (0,1)");
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double sn = std::sqrt(static_cast<double>(n));
    return c / (sn + 0.12 + 0.11 / sn);
}

} // namespace rqmc
