#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "cdd/ou_process.hpp"

using namespace cdd;

TEST_CASE("magnetic noise parameters from T2* and tau") {
    const OuParams p = magnetic_noise_params(3.0, 25.0);
    CHECK(p.sigma == doctest::Approx(0.47140452079103173).epsilon(1e-12));
    CHECK(p.diffusion() == doctest::Approx(4.0 / 225.0).epsilon(1e-12));
    // c tau / 2 == sigma^2 by construction
    CHECK(p.diffusion() * p.tau / 2.0 == doctest::Approx(p.sigma * p.sigma).epsilon(1e-14));

    // T2* -> infinity limit: sigma -> 0
    const OuParams inf = magnetic_noise_params(std::numeric_limits<double>::infinity(), 25.0);
    CHECK(inf.sigma == 0.0);

    CHECK_THROWS(magnetic_noise_params(0.0, 25.0));
    CHECK_THROWS(magnetic_noise_params(3.0, -1.0));
}

TEST_CASE("free-decay envelope identity exp(-sigma^2 t^2 / 2) == exp(-t^2/T2*^2)") {
    const OuParams p = magnetic_noise_params(3.0, 25.0);
    for (double t : {1.0, 3.0, 6.0}) {
        const double lhs = std::exp(-p.sigma * p.sigma * t * t / 2.0);
        const double rhs = std::exp(-t * t / 9.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("drive noise parameters") {
    const OuParams p = drive_noise_params(0.005, 500.0);
    CHECK(p.sigma == 0.005);
    CHECK(p.diffusion() == doctest::Approx(1e-7).epsilon(1e-12));

    const OuParams zero = drive_noise_params(0.0, 500.0);
    CHECK(zero.sigma == 0.0);

    CHECK_THROWS(drive_noise_params(-0.1, 500.0));
    CHECK_THROWS(drive_noise_params(0.005, 0.0));
}

TEST_CASE("ou_step identity and noiseless mean reversion") {
    const OuParams p{10.0, 0.7};
    RngStream rng(5, 0);
    const double x = 1.234;
    CHECK(ou_step(x, 0.0, p, rng) == x);

    const OuParams quiet{10.0, 0.0};
    const double stepped = ou_step(5.0, 2.5, quiet, rng);
    CHECK(stepped == doctest::Approx(5.0 * std::exp(-0.25)).epsilon(1e-14));

    CHECK_THROWS(ou_step(0.0, -1.0, p, rng));
}

TEST_CASE("ou_init draws the stationary law") {
    const OuParams p{25.0, 0.47140452079103173};
    RngStream quiet_rng(2, 0);
    CHECK(ou_init(OuParams{25.0, 0.0}, quiet_rng) == 0.0);

    // determinism across independently constructed streams
    RngStream r1(77, 12), r2(77, 12);
    CHECK(ou_init(p, r1) == ou_init(p, r2));

    const int n = 100000;
    RngStream rng(4, 0);
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = ou_init(p, rng);
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    const double sigma2 = p.sigma * p.sigma;
    CHECK(std::abs(mean) < 3.0 * p.sigma / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - sigma2) < 3.0 * sigma2 * std::sqrt(2.0 / n));
}

TEST_CASE("long-run variance and autocorrelation match the stationary law") {
    const OuParams p{25.0, 0.47140452079103173};
    const double dt = p.tau / 10.0;
    const int n = 1000000;
    RngStream rng(2024, 0);
    std::vector<double> path(n);
    double x = ou_init(p, rng);
    for (int i = 0; i < n; ++i) {
        path[i] = x;
        x = ou_step(x, dt, p, rng);
    }
    double s1 = 0.0;
    for (double v : path) s1 += v;
    const double mean = s1 / n;
    double s2 = 0.0;
    for (double v : path) s2 += (v - mean) * (v - mean);
    const double var = s2 / n;
    const double sigma2 = p.sigma * p.sigma;
    // SE of the sample variance of an AR(1) sequence
    const double rho = std::exp(-dt / p.tau);
    const double se = sigma2 * std::sqrt(2.0 * (1.0 + rho * rho) / (1.0 - rho * rho) / n);
    CHECK(std::abs(var - sigma2) < 3.0 * se);

    for (int lag : {1, 5, 10, 20}) {
        double acc = 0.0;
        for (int i = 0; i + lag < n; ++i) acc += (path[i] - mean) * (path[i + lag] - mean);
        const double corr = acc / ((n - lag) * var);
        CHECK(std::abs(corr - std::exp(-lag * dt / p.tau)) < 0.012);
    }
}

TEST_CASE("composing steps over subintervals matches the one-step law") {
    const OuParams p{25.0, 0.47140452079103173};
    const double a = 3.0, b = 8.0;
    const double x0 = 1.7;
    const int n = 100000;
    RngStream rng(31, 0);
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = ou_step(ou_step(x0, a, p, rng), b, p, rng);
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    const double want_mean = x0 * std::exp(-(a + b) / p.tau);
    const double want_var = p.sigma * p.sigma * (1.0 - std::exp(-2.0 * (a + b) / p.tau));
    CHECK(std::abs(mean - want_mean) < 4.0 * std::sqrt(want_var / n));
    CHECK(std::abs(var - want_var) < 4.0 * want_var * std::sqrt(2.0 / n));
}

TEST_CASE("update is exact for any dt: halving leaves the law unchanged") {
    const OuParams p{25.0, 0.47140452079103173};
    // Algebraic identity of the exact update coefficients.
    const double dt = 4.0;
    const double decay_full = std::exp(-dt / p.tau);
    const double decay_half = std::exp(-dt / 2.0 / p.tau);
    CHECK(decay_half * decay_half == doctest::Approx(decay_full).epsilon(1e-14));
    const double var_full = 1.0 - std::exp(-2.0 * dt / p.tau);
    const double var_half = 1.0 - std::exp(-dt / p.tau);
    // second half-step decays the first innovation, then adds its own
    CHECK(var_half * decay_full + var_half == doctest::Approx(var_full).epsilon(1e-12));

    // frozen-path limit tau = +inf
    const OuParams frozen{std::numeric_limits<double>::infinity(), 0.5};
    RngStream rng(8, 0);
    const double x0 = ou_init(frozen, rng);
    CHECK(ou_step(x0, 123.0, frozen, rng) == x0);
}
