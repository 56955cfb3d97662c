#pragma once

#include <cstddef>
#include <span>

namespace rqmc {

// Inverse standard normal CDF (Acklam's rational approximation, |error| < 1.2e-9).
double normal_quantile(double p);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Chi-square CDF and quantile (Wilson-Hilferty start + Newton refinement).
double chi_square_cdf(double x, double dof);
double chi_square_quantile(double p, double dof);

// Two-sided Kolmogorov-Smirnov statistic against the uniform CDF on [0,1).
double ks_statistic_uniform(std::span<const double> samples);

// Critical value for the KS statistic at significance alpha (Stephens'
// small-sample adjustment of the asymptotic formula).
double ks_critical_uniform(std::size_t n, double alpha);

} // namespace rqmc
