// spin.hpp -- two-level state and exact single-step propagation.
//
// Basis convention: amp0, amp1 are the amplitudes of |0>, |1> with
// sigma_z |0> = +|0>, sigma_z |1> = -|1> (sigma_z = diag(1,-1)).
// Hamiltonians are traceless, H = hx sx + hy sy + hz sz in rad/us;
// a global identity part would only contribute an unobservable phase.

#pragma once

#include <cmath>
#include <complex>

namespace cdd {

using complexd = std::complex<double>;

struct SpinState {
    complexd amp0{1.0, 0.0};
    complexd amp1{0.0, 0.0};
};

struct PauliCoeffs {
    double hx = 0.0;
    double hy = 0.0;
    double hz = 0.0;
};

inline SpinState state_zero()    { return {{1.0, 0.0}, {0.0, 0.0}}; }
inline SpinState state_one()     { return {{0.0, 0.0}, {1.0, 0.0}}; }
inline SpinState state_plus_x()  { const double h = std::sqrt(0.5); return {{h, 0.0}, {h, 0.0}}; }
inline SpinState state_minus_x() { const double h = std::sqrt(0.5); return {{h, 0.0}, {-h, 0.0}}; }
inline SpinState state_plus_y()  { const double h = std::sqrt(0.5); return {{h, 0.0}, {0.0, h}}; }
inline SpinState state_minus_y() { const double h = std::sqrt(0.5); return {{h, 0.0}, {0.0, -h}}; }

inline double norm_squared(const SpinState& s) {
    return std::norm(s.amp0) + std::norm(s.amp1);
}

// |<a|b>|^2, clamped into [0,1] against rounding.
inline double fidelity(const SpinState& a, const SpinState& b) {
    const complexd ov = std::conj(a.amp0) * b.amp0 + std::conj(a.amp1) * b.amp1;
    const double f = std::norm(ov);
    if (f < 0.0) return 0.0;
    if (f > 1.0) return 1.0;
    return f;
}

// Exact SU(2) step: U = exp(-i H dt) = cos(theta) I - i sin(theta) (n.sigma),
// theta = |h| dt. No truncation error; the only drift over long runs is
// floating-point rounding.
inline SpinState evolve_step(const SpinState& s, const PauliCoeffs& h, double dt) {
    const double hn = std::sqrt(h.hx * h.hx + h.hy * h.hy + h.hz * h.hz);
    if (hn == 0.0 || dt == 0.0) return s;
    const double theta = hn * dt;
    const double c = std::cos(theta);
    const double sn = std::sin(theta) / hn;
    const double ax = h.hx * sn, ay = h.hy * sn, az = h.hz * sn;
    // U = [ c - i az,  -i ax - ay ]
    //     [ -i ax + ay,  c + i az ]
    const complexd u00{c, -az};
    const complexd u01{-ay, -ax};
    const complexd u10{ay, -ax};
    const complexd u11{c, az};
    return {u00 * s.amp0 + u01 * s.amp1, u10 * s.amp0 + u11 * s.amp1};
}

} // namespace cdd
