#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rqmc/errors.hpp"
#include "rqmc/stats.hpp"

using namespace rqmc;

TEST_CASE("normal_quantile hits tabulated values") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-7));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.575829304).epsilon(1e-7));
    CHECK(normal_quantile(0.841344746) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(normal_quantile(0.05) == doctest::Approx(-1.644853627).epsilon(1e-7));
    // Symmetry.
    for (double p : {0.6, 0.75, 0.9, 0.99})
        CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-9));
}

TEST_CASE("gamma_p matches closed forms") {
    // P(1, x) = 1 - exp(-x).
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0})
        CHECK(gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
    // P(1/2, x) = erf(sqrt(x)).
    for (double x : {0.2, 1.0, 3.0})
        CHECK(gamma_p(0.5, x) == doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-10));
    // P(2, x) = 1 - (1+x) exp(-x).
    CHECK(gamma_p(2.0, 3.0) == doctest::Approx(1.0 - 4.0 * std::exp(-3.0)).epsilon(1e-12));
    CHECK(gamma_p(3.0, 0.0) == 0.0);
}

TEST_CASE("chi-square CDF follows from gamma_p and the exponential family") {
    // dof = 2 is Exp(1/2): CDF = 1 - exp(-x/2).
    for (double x : {0.5, 1.0, 4.0, 10.0})
        CHECK(chi_square_cdf(x, 2.0) == doctest::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-12));
    CHECK(chi_square_cdf(0.0, 5.0) == 0.0);
    // Monotone in x.
    CHECK(chi_square_cdf(3.0, 4.0) < chi_square_cdf(5.0, 4.0));
}

TEST_CASE("chi-square quantile inverts the CDF and hits table values") {
    CHECK(chi_square_quantile(0.999, 7.0) == doctest::Approx(24.3219).epsilon(2e-4));
    CHECK(chi_square_quantile(0.95, 3.0) == doctest::Approx(7.8147).epsilon(2e-4));
    CHECK(chi_square_quantile(0.99, 9.0) == doctest::Approx(21.6660).epsilon(2e-4));
    for (double dof : {1.0, 4.0, 12.0})
        for (double p : {0.1, 0.5, 0.9, 0.999}) {
            double q = chi_square_quantile(p, dof);
            CHECK(chi_square_cdf(q, dof) == doctest::Approx(p).epsilon(1e-8));
        }
}

TEST_CASE("KS statistic against the uniform CDF") {
    // A single sample at u: D = max(u, 1 - u).
    CHECK(ks_statistic_uniform(std::vector<double>{0.3}) == doctest::Approx(0.7).epsilon(1e-15));
    // Evenly spread centered grid: D = 1/(2n).
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back((i + 0.5) / 10.0);
    CHECK(ks_statistic_uniform(grid) == doctest::Approx(0.05).epsilon(1e-13));
    // All mass at one spot is maximally non-uniform.
    std::vector<double> clump(50, 0.999);
    CHECK(ks_statistic_uniform(clump) == doctest::Approx(0.999).epsilon(1e-12));
}

TEST_CASE("KS critical value separates uniform from shifted samples") {
    std::mt19937_64 gen(2025);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> uniform(800), skewed(800);
    for (std::size_t i = 0; i < uniform.size(); ++i) {
        uniform[i] = dist(gen);
        skewed[i] = std::pow(uniform[i], 1.35);
    }
    double crit = ks_critical_uniform(800, 0.05);
    CHECK(crit > 0.0);
    CHECK(crit < 0.1);
    CHECK(ks_statistic_uniform(uniform) < crit);
    CHECK(ks_statistic_uniform(skewed) > crit);
    // Critical value shrinks roughly like 1/sqrt(n).
    double crit_small = ks_critical_uniform(50, 0.05);
    double ratio = crit_small / crit;
    CHECK(ratio == doctest::Approx(std::sqrt(800.0 / 50.0)).epsilon(0.08));
}
