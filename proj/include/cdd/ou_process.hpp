// ou_process.hpp -- exact Ornstein-Uhlenbeck updates for the two noise
// channels of the simulation: magnetic field noise B(t) (rad/us) and
// relative drive-amplitude noise delta(t) (dimensionless).
//
// The process is stationary Gaussian with autocorrelation
//   <x(t) x(t')> = sigma^2 exp(-|t-t'|/tau),  sigma^2 = c*tau/2,
// where c is the diffusion constant. The sample update
//   x(t+dt) = x(t) e^(-dt/tau) + n sigma sqrt(1 - e^(-2 dt/tau))
// is exact for any dt, so step size is purely an integration concern
// of the caller.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cdd/rng.hpp"

namespace cdd {

struct OuParams {
    double tau = 1.0;    // correlation time (us); +infinity freezes the path
    double sigma = 0.0;  // stationary standard deviation

    // Diffusion constant, c = 2 sigma^2 / tau.
    double diffusion() const { return 2.0 * sigma * sigma / tau; }
};

inline void validate(const OuParams& p) {
    if (!(p.tau > 0.0)) throw std::invalid_argument("OU correlation time must be > 0");
    if (!(p.sigma >= 0.0)) throw std::invalid_argument("OU sigma must be >= 0");
}

// Draw the initial value from the stationary law N(0, sigma^2).
inline double ou_init(const OuParams& p, RngStream& rng) {
    if (p.sigma == 0.0) return 0.0;
    return p.sigma * rng.gaussian();
}

// Advance the path by dt (>= 0). dt = 0 returns x unchanged.
inline double ou_step(double x, double dt, const OuParams& p, RngStream& rng) {
    if (dt < 0.0) throw std::invalid_argument("ou_step: dt must be >= 0");
    const double decay = std::exp(-dt / p.tau);
    const double innovation = p.sigma * std::sqrt(-std::expm1(-2.0 * dt / p.tau));
    return x * decay + rng.gaussian() * innovation;
}

// Precomputed step coefficients for a fixed dt; the hot loop uses this
// instead of recomputing the exponentials every step.
struct OuStepper {
    OuStepper(const OuParams& p, double dt)
        : decay_(std::exp(-dt / p.tau)),
          innovation_(p.sigma * std::sqrt(-std::expm1(-2.0 * dt / p.tau))) {}

    double step(double x, RngStream& rng) const {
        return x * decay_ + rng.gaussian() * innovation_;
    }

private:
    double decay_;
    double innovation_;
};

// Magnetic noise channel from the free-evolution dephasing time T2*
// and the correlation time: c = 4 / (T2*^2 tau), i.e. sigma = sqrt(2)/T2*.
// With the B(t)/2 sigma_z coupling used by the schemes this makes the
// ensemble-averaged free decay equal (1 + exp(-t^2/T2*^2))/2 in the
// quasi-static limit.
inline OuParams magnetic_noise_params(double t2_star, double tau) {
    if (!(t2_star > 0.0))
        throw std::invalid_argument("magnetic_noise_params: T2* must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("magnetic_noise_params: tau must be > 0");
    return OuParams{tau, std::sqrt(2.0) / t2_star};  // T2* = +inf gives sigma = 0
}

// Relative drive-amplitude noise channel: delta_rel is the stationary
// relative standard deviation, so c = 2 delta_rel^2 / tau.
inline OuParams drive_noise_params(double delta_rel, double tau_drive) {
    if (!(delta_rel >= 0.0)) throw std::invalid_argument("drive_noise_params: delta_rel must be >= 0");
    if (!(tau_drive > 0.0)) throw std::invalid_argument("drive_noise_params: tau must be > 0");
    return OuParams{tau_drive, delta_rel};
}

} // namespace cdd
