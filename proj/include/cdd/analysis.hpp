// analysis.hpp -- decay-model fitting, reference curves and the
// sinusoid extractor used by the magnetometry protocols.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdd/curve.hpp"
#include "cdd/rng.hpp"

namespace cdd {

struct FitError : std::runtime_error {
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

enum class DecayModel { gaussian, exponential };

inline const char* to_string(DecayModel m) {
    return m == DecayModel::gaussian ? "gaussian" : "exponential";
}

// Fidelity references with the asymptote fixed at 1/2.
inline double analytic_free_decay(double t, double t2_star) {
    if (!(t2_star > 0.0)) throw std::invalid_argument("analytic_free_decay: T2* must be > 0");
    const double x = t / t2_star;
    return 0.5 * (1.0 + std::exp(-x * x));
}

inline double analytic_exponential_decay(double t, double t2) {
    if (!(t2 > 0.0)) throw std::invalid_argument("analytic_exponential_decay: T2 must be > 0");
    return 0.5 * (1.0 + std::exp(-t / t2));
}

inline double decay_model_value(DecayModel model, double t, double t2, double floor = 0.5) {
    const double x = model == DecayModel::gaussian ? (t / t2) * (t / t2) : t / t2;
    return floor + (1.0 - floor) * std::exp(-x);
}

struct FitResult {
    DecayModel model = DecayModel::gaussian;
    double t2 = 0.0;               // us
    double residual_rms = 0.0;     // unweighted rms over the fitted points
    double fit_uncertainty = 0.0;  // us, residual bootstrap over 100 resamples
    double floor = 0.5;            // fitted asymptote when the floor is free
};

struct FitOptions {
    bool fit_floor = false;  // when true the asymptote is fitted instead of fixed at 1/2
};

namespace detail {

struct FitData {
    std::vector<double> t, y, w;  // points entering the objective
};

// Selects the points entering the objective. Points with sem = 0 carry no
// weight; if too few weighted points remain the fit falls back to uniform
// weights (the t = 0 point is always dropped, the models match it exactly).
inline FitData prepare_fit_data(const DecayCurve& c) {
    FitData d;
    std::size_t weighted = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c.sem[i] > 0.0) ++weighted;
    const bool use_weights = weighted >= 10;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (use_weights) {
            if (c.sem[i] <= 0.0) continue;
            d.t.push_back(c.times[i]);
            d.y.push_back(c.mean[i]);
            d.w.push_back(1.0 / (c.sem[i] * c.sem[i]));
        } else {
            if (i == 0) continue;
            d.t.push_back(c.times[i]);
            d.y.push_back(c.mean[i]);
            d.w.push_back(1.0);
        }
    }
    return d;
}

inline double fit_sse(const FitData& d, DecayModel model, double t2, double floor) {
    double sse = 0.0;
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        const double r = d.y[i] - decay_model_value(model, d.t[i], t2, floor);
        sse += d.w[i] * r * r;
    }
    return sse;
}

// Logarithmic coarse grid followed by golden-section refinement of log(T2).
inline double minimize_t2(const FitData& d, DecayModel model, double floor,
                          double lo, double hi, int grid_points = 60) {
    const double llo = std::log(lo), lhi = std::log(hi);
    int best = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_points; ++i) {
        const double t2 = std::exp(llo + (lhi - llo) * i / (grid_points - 1));
        const double sse = fit_sse(d, model, t2, floor);
        if (sse < best_sse) {
            best_sse = sse;
            best = i;
        }
    }
    const double step = (lhi - llo) / (grid_points - 1);
    double a = llo + step * std::max(0, best - 1);
    double b = llo + step * std::min(grid_points - 1, best + 1);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = fit_sse(d, model, std::exp(x1), floor);
    double f2 = fit_sse(d, model, std::exp(x2), floor);
    while (b - a > 1e-4) {  // 1e-4 relative on T2 (absolute on log T2)
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a);
            f1 = fit_sse(d, model, std::exp(x1), floor);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a);
            f2 = fit_sse(d, model, std::exp(x2), floor);
        }
    }
    return std::exp(0.5 * (a + b));
}

inline double minimize_floor(const FitData& d, DecayModel model, double t2) {
    // The model is linear in the floor: y = A + (1-A) e, so A has a
    // closed-form least-squares solution.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        const double e = decay_model_value(model, d.t[i], t2, 0.0);  // plain exp term
        num += d.w[i] * (d.y[i] - e) * (1.0 - e);
        den += d.w[i] * (1.0 - e) * (1.0 - e);
    }
    if (den <= 0.0) return 0.5;
    return std::clamp(num / den, 0.0, 0.95);
}

// A curve that never leaves 1, or that rises substantially above its own
// running minimum, is not a decay and cannot be fitted.
inline void check_fittable(const DecayCurve& c) {
    double lowest = 1.0;
    for (double m : c.mean) lowest = std::min(lowest, m);
    if (lowest >= 0.99) throw FitError("degenerate curve: no decay (all points >= 0.99)");

    std::vector<double> sorted_sem(c.sem.begin(), c.sem.end());
    std::sort(sorted_sem.begin(), sorted_sem.end());
    const double median_sem = sorted_sem[sorted_sem.size() / 2];
    const double threshold = std::max(0.1, 10.0 * median_sem);

    // Light smoothing so single-point noise does not trip the check.
    const std::size_t n = c.size();
    double running_min = 2.0, max_rise = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i >= 2 ? i - 2 : 0;
        const std::size_t b = std::min(n - 1, i + 2);
        double s = 0.0;
        for (std::size_t j = a; j <= b; ++j) s += c.mean[j];
        s /= static_cast<double>(b - a + 1);
        running_min = std::min(running_min, s);
        max_rise = std::max(max_rise, s - running_min);
    }
    if (max_rise > threshold)
        throw FitError("degenerate curve: non-monotone beyond noise (rise " +
                       std::to_string(max_rise) + ")");
}

} // namespace detail

// Weighted least-squares fit of a decay model to an ensemble curve.
// The search is fully deterministic (fixed grid, golden-section refinement,
// fixed bootstrap seed).
inline FitResult fit_decay(const DecayCurve& curve, DecayModel model,
                           const FitOptions& options = {}) {
    if (curve.size() < 10) throw FitError("fit_decay: need at least 10 points");
    if (!(curve.mean[0] > 0.9)) throw FitError("fit_decay: curve does not start near 1");
    detail::check_fittable(curve);

    const detail::FitData data = detail::prepare_fit_data(curve);
    const double dt = curve.times[1] - curve.times[0];
    const double duration = curve.times.back();
    const double lo = dt, hi = 100.0 * duration;

    double floor = 0.5;
    double t2 = detail::minimize_t2(data, model, floor, lo, hi);
    if (options.fit_floor) {
        // coordinate descent; the (floor, T2) valley is correlated, so allow
        // plenty of rounds and stop on stagnation
        for (int round = 0; round < 60; ++round) {
            const double prev_floor = floor, prev_t2 = t2;
            floor = detail::minimize_floor(data, model, t2);
            t2 = detail::minimize_t2(data, model, floor, lo, hi);
            if (std::abs(floor - prev_floor) < 1e-6 &&
                std::abs(t2 - prev_t2) < 1e-6 * prev_t2)
                break;
        }
    }

    FitResult result;
    result.model = model;
    result.t2 = t2;
    result.floor = floor;

    std::vector<double> residuals(data.t.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < data.t.size(); ++i) {
        residuals[i] = data.y[i] - decay_model_value(model, data.t[i], t2, floor);
        ss += residuals[i] * residuals[i];
    }
    result.residual_rms = std::sqrt(ss / static_cast<double>(data.t.size()));

    // Residual bootstrap, 100 resamples with a fixed stream.
    RngStream rng(0x0F17B007ull, 0);
    std::vector<double> estimates;
    estimates.reserve(100);
    detail::FitData boot = data;
    for (int k = 0; k < 100; ++k) {
        for (std::size_t i = 0; i < data.t.size(); ++i) {
            const auto j = static_cast<std::size_t>(rng.uniform() * data.t.size());
            boot.y[i] = decay_model_value(model, data.t[i], t2, floor) +
                        residuals[std::min(j, data.t.size() - 1)];
        }
        estimates.push_back(detail::minimize_t2(boot, model, floor, lo, hi, 30));
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    result.fit_uncertainty = std::sqrt(var / static_cast<double>(estimates.size() - 1));
    return result;
}

// Fits both models and returns the one with the lower residual rms;
// ties within 1% go to the exponential model.
inline FitResult model_select(const DecayCurve& curve, const FitOptions& options = {}) {
    const FitResult g = fit_decay(curve, DecayModel::gaussian, options);
    const FitResult e = fit_decay(curve, DecayModel::exponential, options);
    if (e.residual_rms <= g.residual_rms * 1.01) return e;
    return g;
}

// ---------------------------------------------------------------------------
// Sinusoid fitting for oscillation curves.

struct SinusoidFit {
    double omega = 0.0;      // dominant angular frequency (rad/us)
    double amplitude = 0.0;  // sqrt(b^2 + c^2) of the cos/sin pair
    double offset = 0.0;
    double residual_rms = 0.0;
};

namespace detail {

// For fixed omega, y ~ a + b cos(wt) + c sin(wt) is linear least squares;
// returns the sum of squared residuals and the coefficients.
inline double sinusoid_sse(const std::vector<double>& t, const std::vector<double>& y,
                           double omega, double* a_out = nullptr, double* b_out = nullptr,
                           double* c_out = nullptr) {
    const std::size_t n = t.size();
    double s_c = 0, s_s = 0, s_cc = 0, s_ss = 0, s_cs = 0, s_y = 0, s_yc = 0, s_ys = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cw = std::cos(omega * t[i]);
        const double sw = std::sin(omega * t[i]);
        s_c += cw; s_s += sw; s_cc += cw * cw; s_ss += sw * sw; s_cs += cw * sw;
        s_y += y[i]; s_yc += y[i] * cw; s_ys += y[i] * sw;
    }
    // Solve the 3x3 normal equations by Gaussian elimination.
    double m[3][4] = {
        {static_cast<double>(n), s_c, s_s, s_y},
        {s_c, s_cc, s_cs, s_yc},
        {s_s, s_cs, s_ss, s_ys},
    };
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        std::swap(m[col], m[piv]);
        if (std::abs(m[col][col]) < 1e-30) return std::numeric_limits<double>::infinity();
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int cc = col; cc < 4; ++cc) m[r][cc] -= f * m[col][cc];
        }
    }
    const double a = m[0][3] / m[0][0];
    const double b = m[1][3] / m[1][1];
    const double c = m[2][3] / m[2][2];
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (a + b * std::cos(omega * t[i]) + c * std::sin(omega * t[i]));
        sse += r * r;
    }
    if (a_out) *a_out = a;
    if (b_out) *b_out = b;
    if (c_out) *c_out = c;
    return sse;
}

} // namespace detail

// Least-squares fit of a single sinusoid; grid scan over omega followed by
// golden-section refinement. Requires at least 3 oscillation periods inside
// the record and a clearly nonzero amplitude.
inline SinusoidFit fit_sinusoid(const std::vector<double>& times,
                                const std::vector<double>& values) {
    const std::size_t n = times.size();
    if (n < 16) throw FitError("fit_sinusoid: need at least 16 samples");
    const double span = times.back() - times.front();
    const double dt_med = span / static_cast<double>(n - 1);
    const double two_pi = 6.283185307179586476925286766559;
    const double omega_lo = 0.5 * two_pi / span;          // half a period in the record
    const double omega_hi = 0.9 * 3.141592653589793 / dt_med;
    const double step = two_pi / (10.0 * span);           // a tenth of the Rayleigh width

    double best_omega = omega_lo;
    double best_sse = std::numeric_limits<double>::infinity();
    for (double w = omega_lo; w <= omega_hi; w += step) {
        const double sse = detail::sinusoid_sse(times, values, w);
        if (sse < best_sse) {
            best_sse = sse;
            best_omega = w;
        }
    }

    double a = best_omega - step, b = best_omega + step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = detail::sinusoid_sse(times, values, x1);
    double f2 = detail::sinusoid_sse(times, values, x2);
    while (b - a > 1e-9 * best_omega) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a);
            f1 = detail::sinusoid_sse(times, values, x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a);
            f2 = detail::sinusoid_sse(times, values, x2);
        }
    }

    SinusoidFit fit;
    fit.omega = 0.5 * (a + b);
    double coef_a = 0, coef_b = 0, coef_c = 0;
    const double sse = detail::sinusoid_sse(times, values, fit.omega, &coef_a, &coef_b, &coef_c);
    fit.offset = coef_a;
    fit.amplitude = std::sqrt(coef_b * coef_b + coef_c * coef_c);
    fit.residual_rms = std::sqrt(sse / static_cast<double>(n));

    if (fit.amplitude < 1e-6)
        throw FitError("fit_sinusoid: no oscillation detected (amplitude ~ 0)");
    if (fit.amplitude < 3.0 * fit.residual_rms)
        throw FitError("fit_sinusoid: oscillation not significant above residual");
    if (fit.omega * span < 3.0 * two_pi)
        throw FitError("fit_sinusoid: fewer than 3 oscillation periods in the record");
    return fit;
}

} // namespace cdd
