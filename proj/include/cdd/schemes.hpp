// schemes.hpp -- rotating-frame Hamiltonian coefficients for the four
// driving schemes and the optional sensing signal.
//
// Frame and sign conventions, used consistently everywhere:
//   * The frame rotates at the bare splitting omega0 about z,
//     U_frame = exp(-i omega0 t sigma_z / 2).
//   * A lab drive A(t) sigma_x cos(omega0 t + theta(t)) maps to
//     (A/2)(cos(theta) sigma_x + sin(theta) sigma_y) after dropping the
//     terms oscillating at 2*omega0 (rwa mode). counter_rotating mode
//     keeps those terms, evaluated with the configured finite omega0.
//   * A lab sigma_z term commutes with the frame rotation and passes
//     through unchanged.
//   * Magnetic noise enters as B(t)/2 sigma_z, drive amplitude noise
//     multiplicatively as Omega1 (1 + d1(t)).
//
// Schemes:
//   free    : hz = B/2
//   single  : hz = B/2,  hx = Omega1 (1+d1) / 2
//   double  : single plus a lab-frame second drive
//             Omega2 (1+d2) cos(second_drive_freq * t) sigma_z
//   tdd     : a single drive whose instantaneous frequency is
//             omega0 + 2 Omega2 cos(Omega1 t), i.e. phase modulation
//             phi(t) = 2 (Omega2/Omega1) sin(Omega1 t). The detuning is
//             generated noiselessly, so the d2 channel must stay off.
//
// Sensing signal:
//   axis z : adds g cos(omega_d t) to hz
//   axis x : adds (g/2) cos(D t) to hx and (g/2) sin(D t) to hy with
//            D = omega0 - omega_d (rwa); counter_rotating mode keeps the
//            partner terms at omega0 + omega_d.
//
// All frequencies and amplitudes are angular, rad/us.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdd/spin.hpp"

namespace cdd {

enum class SchemeKind { free, single, double_drive, tdd };
enum class RwaMode { rwa, counter_rotating };

inline const char* to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::free: return "free";
        case SchemeKind::single: return "single";
        case SchemeKind::double_drive: return "double";
        case SchemeKind::tdd: return "tdd";
    }
    return "?";
}

inline const char* to_string(RwaMode m) {
    return m == RwaMode::rwa ? "rwa" : "counter-rotating";
}

struct SchemeSpec {
    SchemeKind kind = SchemeKind::free;
    double omega0 = 1000.0;           // bare splitting; only counter-rotating
                                      // terms and x-signal detunings use it
    double omega1 = 10.0;             // first Rabi frequency
    double omega2 = 1.0;              // second drive / detuning-modulation amplitude
    double second_drive_freq = 10.0;  // sigma_z drive frequency in the double scheme
    RwaMode rwa_mode = RwaMode::rwa;
    bool noise_b = true;              // B(t) channel enabled
    bool noise_d1 = true;             // delta1(t) channel enabled
    bool noise_d2 = true;             // delta2(t) channel enabled (double only)
};

enum class SignalAxis { z, x };

struct SignalSpec {
    SignalAxis axis = SignalAxis::z;
    double g = 0.0;        // signal amplitude (rad/us)
    double omega_d = 0.0;  // signal angular frequency (rad/us)
};

// Validates invariants; returns non-fatal warnings, throws std::invalid_argument
// on violations.
inline std::vector<std::string> validate(const SchemeSpec& spec,
                                         const std::optional<SignalSpec>& signal = std::nullopt) {
    std::vector<std::string> warnings;
    const bool uses_second = spec.kind == SchemeKind::double_drive || spec.kind == SchemeKind::tdd;
    if (spec.kind != SchemeKind::free && !(spec.omega1 >= 0.0))
        throw std::invalid_argument("omega1 must be >= 0");
    if (uses_second && !(spec.omega2 >= 0.0))
        throw std::invalid_argument("omega2 must be >= 0");
    if (spec.kind == SchemeKind::tdd && !(spec.omega1 > 0.0))
        throw std::invalid_argument("tdd scheme requires omega1 > 0");
    if (spec.kind != SchemeKind::free && spec.omega2 > 0.0 &&
        !(spec.omega2 < spec.omega1))
        throw std::invalid_argument("hierarchy violated: omega2 must be < omega1");
    if (uses_second && spec.omega2 > spec.omega1 / 5.0)
        warnings.push_back("omega2 > omega1/5: the second rotating-wave approximation is strained");
    if (spec.kind == SchemeKind::tdd && spec.noise_d2)
        throw std::invalid_argument("tdd scheme: the detuning is generated noiselessly, noise_d2 must be off");
    if (spec.rwa_mode == RwaMode::counter_rotating &&
        !(std::isfinite(spec.omega0) && spec.omega0 > 0.0))
        throw std::invalid_argument("counter-rotating mode requires a finite omega0 > 0");
    if (signal) {
        if (!(signal->g >= 0.0)) throw std::invalid_argument("signal amplitude g must be >= 0");
        if (signal->axis == SignalAxis::x &&
            !(std::isfinite(spec.omega0) && spec.omega0 > 0.0))
            throw std::invalid_argument("x-axis signal requires a finite omega0 > 0");
    }
    return warnings;
}

// Phase modulation of the tdd drive, phi(t) = 2 (Omega2/Omega1) sin(Omega1 t).
inline double detuning_phase(double t, double omega1, double omega2) {
    if (!(omega1 > 0.0)) throw std::invalid_argument("detuning_phase: omega1 must be > 0");
    return 2.0 * (omega2 / omega1) * std::sin(omega1 * t);
}

// Accumulated detuning, int_0^t 2 Omega2 cos(Omega1 t') dt'
// = 2 Omega2 t sinc(Omega1 t). Identically equal to detuning_phase(t).
inline double detuning_phase_integral(double t, double omega1, double omega2) {
    if (!(omega1 > 0.0)) throw std::invalid_argument("detuning_phase_integral: omega1 must be > 0");
    const double x = omega1 * t;
    const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
    return 2.0 * omega2 * t * sinc;
}

// Rotating-frame Hamiltonian coefficients at time t. Noise values must be
// passed as 0 for disabled channels; d2 is rejected for the tdd scheme.
inline PauliCoeffs hamiltonian_at(double t, const SchemeSpec& spec,
                                  const std::optional<SignalSpec>& signal,
                                  double b, double d1, double d2) {
    PauliCoeffs h;
    h.hz = 0.5 * b;

    const bool keep_counter_rotating = spec.rwa_mode == RwaMode::counter_rotating;
    if (keep_counter_rotating && !(std::isfinite(spec.omega0) && spec.omega0 > 0.0))
        throw std::invalid_argument("counter-rotating mode requires a finite omega0 > 0");

    switch (spec.kind) {
        case SchemeKind::free:
            break;
        case SchemeKind::single:
        case SchemeKind::tdd: {
            if (spec.kind == SchemeKind::tdd && d2 != 0.0)
                throw std::invalid_argument("tdd scheme carries no d2 noise channel");
            const double amp = 0.5 * spec.omega1 * (1.0 + d1);
            const double phi = spec.kind == SchemeKind::tdd
                                   ? detuning_phase(t, spec.omega1, spec.omega2)
                                   : 0.0;
            h.hx += amp * std::cos(phi);
            h.hy += amp * std::sin(phi);
            if (keep_counter_rotating) {
                const double fast = 2.0 * spec.omega0 * t + phi;
                h.hx += amp * std::cos(fast);
                h.hy -= amp * std::sin(fast);
            }
            break;
        }
        case SchemeKind::double_drive: {
            const double amp = 0.5 * spec.omega1 * (1.0 + d1);
            h.hx += amp;
            if (keep_counter_rotating) {
                const double fast = 2.0 * spec.omega0 * t;
                h.hx += amp * std::cos(fast);
                h.hy -= amp * std::sin(fast);
            }
            // The lab-frame sigma_z drive commutes with the frame rotation.
            h.hz += spec.omega2 * (1.0 + d2) * std::cos(spec.second_drive_freq * t);
            break;
        }
    }

    if (signal && signal->g != 0.0) {
        if (signal->axis == SignalAxis::z) {
            h.hz += signal->g * std::cos(signal->omega_d * t);
        } else {
            const double delta = spec.omega0 - signal->omega_d;
            const double half_g = 0.5 * signal->g;
            h.hx += half_g * std::cos(delta * t);
            h.hy += half_g * std::sin(delta * t);
            if (keep_counter_rotating) {
                const double sum = (spec.omega0 + signal->omega_d) * t;
                h.hx += half_g * std::cos(sum);
                h.hy += half_g * std::sin(sum);
            }
        }
    }

    return h;
}

// Fastest retained angular frequency, used for the dt bound
// (dt * fastest <= 0.05 rad).
inline double fastest_frequency(const SchemeSpec& spec,
                                const std::optional<SignalSpec>& signal = std::nullopt) {
    double w = 0.0;
    if (spec.kind != SchemeKind::free) w = std::max(w, spec.omega1);
    if (spec.kind == SchemeKind::double_drive) w = std::max(w, spec.second_drive_freq);
    if (signal && signal->g != 0.0) {
        if (signal->axis == SignalAxis::z) {
            w = std::max(w, std::abs(signal->omega_d));
        } else {
            w = std::max(w, std::abs(spec.omega0 - signal->omega_d));
        }
    }
    if (spec.rwa_mode == RwaMode::counter_rotating) {
        w = std::max(w, 2.0 * spec.omega0);
        if (signal && signal->axis == SignalAxis::x)
            w = std::max(w, spec.omega0 + signal->omega_d);
    }
    return w;
}

} // namespace cdd
