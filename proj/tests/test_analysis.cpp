#include "doctest.h"

#include <cmath>
#include <vector>

#include "cdd/analysis.hpp"
#include "cdd/rng.hpp"

using namespace cdd;

namespace {

DecayCurve synthetic_curve(DecayModel model, double t2, double t_max, double dt,
                           double sem_value = 1e-3, double floor = 0.5) {
    DecayCurve c;
    for (double t = 0.0; t <= t_max + 1e-12; t += dt) {
        c.times.push_back(t);
        c.mean.push_back(decay_model_value(model, t, t2, floor));
        c.sem.push_back(t == 0.0 ? 0.0 : sem_value);
    }
    return c;
}

} // namespace

TEST_CASE("analytic reference curves") {
    CHECK(analytic_free_decay(0.0, 3.0) == 1.0);
    CHECK(analytic_free_decay(3.0, 3.0) == doctest::Approx(0.6839397205857212).epsilon(1e-12));
    CHECK(analytic_free_decay(1000.0, 3.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(analytic_exponential_decay(0.0, 1000.0) == 1.0);
    CHECK(analytic_exponential_decay(1000.0, 1000.0) ==
          doctest::Approx(0.6839397205857212).epsilon(1e-12));
    CHECK(analytic_exponential_decay(3000.0, 1000.0) ==
          doctest::Approx(0.5248935341839319).epsilon(1e-12));
    CHECK_THROWS(analytic_free_decay(1.0, 0.0));
    CHECK_THROWS(analytic_exponential_decay(1.0, -3.0));
}

TEST_CASE("fit recovers noiseless synthetic curves") {
    const DecayCurve g = synthetic_curve(DecayModel::gaussian, 3.0, 10.0, 0.05);
    const FitResult fg = fit_decay(g, DecayModel::gaussian);
    CHECK(fg.t2 == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(fg.residual_rms < 1e-4);  // limited by the 1e-4 relative stop on T2

    const DecayCurve e = synthetic_curve(DecayModel::exponential, 1000.0, 3000.0, 10.0);
    const FitResult fe = fit_decay(e, DecayModel::exponential);
    CHECK(fe.t2 == doctest::Approx(1000.0).epsilon(1e-3));
}

TEST_CASE("fit consistency on arbitrary grids") {
    for (double dt : {0.11, 0.53, 1.7}) {
        const DecayCurve c = synthetic_curve(DecayModel::gaussian, 7.3, 25.0, dt);
        const FitResult f = fit_decay(c, DecayModel::gaussian);
        CHECK(f.t2 == doctest::Approx(7.3).epsilon(1e-3));
    }
}

TEST_CASE("fit tolerates per-point noise") {
    RngStream rng(55, 0);
    DecayCurve c = synthetic_curve(DecayModel::gaussian, 3.0, 10.0, 0.02, 0.01);
    for (std::size_t i = 1; i < c.size(); ++i) {
        c.mean[i] += 0.01 * rng.gaussian();
        c.mean[i] = std::min(1.0, std::max(0.0, c.mean[i]));
    }
    const FitResult f = fit_decay(c, DecayModel::gaussian);
    CHECK(f.t2 == doctest::Approx(3.0).epsilon(0.03));
    CHECK(f.fit_uncertainty > 0.0);
    CHECK(f.fit_uncertainty < 0.5);
}

TEST_CASE("time-axis stretch scales the fitted T2") {
    const double k = 7.3;
    DecayCurve c = synthetic_curve(DecayModel::exponential, 40.0, 160.0, 0.8);
    const FitResult base = fit_decay(c, DecayModel::exponential);
    for (double& t : c.times) t *= k;
    const FitResult stretched = fit_decay(c, DecayModel::exponential);
    CHECK(stretched.t2 / base.t2 == doctest::Approx(k).epsilon(1e-3));
}

TEST_CASE("model selection") {
    const DecayCurve g = synthetic_curve(DecayModel::gaussian, 3.0, 10.0, 0.05);
    CHECK(model_select(g).model == DecayModel::gaussian);
    const DecayCurve e = synthetic_curve(DecayModel::exponential, 50.0, 200.0, 1.0);
    CHECK(model_select(e).model == DecayModel::exponential);
}

TEST_CASE("degenerate curves are rejected") {
    DecayCurve flat;
    for (int i = 0; i < 100; ++i) {
        flat.times.push_back(i);
        flat.mean.push_back(1.0);
        flat.sem.push_back(i == 0 ? 0.0 : 1e-3);
    }
    CHECK_THROWS_AS(fit_decay(flat, DecayModel::exponential), FitError);

    DecayCurve wave;
    for (int i = 0; i < 400; ++i) {
        wave.times.push_back(i);
        wave.mean.push_back(0.5 + 0.5 * std::cos(0.05 * i));
        wave.sem.push_back(i == 0 ? 0.0 : 1e-3);
    }
    CHECK_THROWS_AS(fit_decay(wave, DecayModel::gaussian), FitError);

    DecayCurve tiny = synthetic_curve(DecayModel::gaussian, 1.0, 0.4, 0.05);
    CHECK_THROWS_AS(fit_decay(tiny, DecayModel::gaussian), FitError);  // < 10 points
}

TEST_CASE("optional free asymptote") {
    const DecayCurve c = synthetic_curve(DecayModel::exponential, 50.0, 300.0, 1.0, 1e-3, 0.62);
    FitOptions opt;
    opt.fit_floor = true;
    const FitResult f = fit_decay(c, DecayModel::exponential, opt);
    CHECK(f.floor == doctest::Approx(0.62).epsilon(0.03));
    CHECK(f.t2 == doctest::Approx(50.0).epsilon(0.02));
}

TEST_CASE("sinusoid fit on exact and noisy data") {
    // 0.0125 rad/us over 2000 us is just under 4 periods
    std::vector<double> t, y;
    for (int i = 0; i <= 2000; ++i) {
        t.push_back(i);
        y.push_back(0.5 * (1.0 + std::cos(0.0125 * i)));
    }
    const SinusoidFit exact = fit_sinusoid(t, y);
    CHECK(std::abs(exact.omega - 0.0125) < 1e-6);
    CHECK(exact.amplitude == doctest::Approx(0.5).epsilon(1e-6));

    RngStream rng(77, 0);
    std::vector<double> noisy = y;
    for (double& v : noisy) v += 0.01 * rng.gaussian();
    const SinusoidFit n = fit_sinusoid(t, noisy);
    CHECK(std::abs(n.omega - 0.0125) < 0.01 * 0.0125);

    std::vector<double> constant(t.size(), 0.75);
    CHECK_THROWS_AS(fit_sinusoid(t, constant), FitError);

    // fewer than 3 periods in the record
    std::vector<double> slow;
    for (int i = 0; i <= 2000; ++i) slow.push_back(0.5 * (1.0 + std::cos(0.004 * i)));
    CHECK_THROWS_AS(fit_sinusoid(t, slow), FitError);
}
