// experiment.hpp -- trajectory ensembles for coherence-decay experiments
// and the two magnetometry protocols.
//
// Observable: each trajectory co-evolves the noisy state and a noiseless
// reference of the same scheme from the same initial state and records
// F(t) = |<psi_ref(t)|psi_noisy(t)>|^2. For the free scheme this
// reproduces the (1 + exp(-t^2/T2*^2))/2 law; driven schemes decay from
// 1 towards 1/2 under pure dephasing.
//
// Determinism: a trajectory is a pure function of (config, index); the
// ensemble reduction runs in index order over a pre-indexed buffer, so
// results are bitwise independent of the worker count.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cdd/analysis.hpp"
#include "cdd/curve.hpp"
#include "cdd/ou_process.hpp"
#include "cdd/rng.hpp"
#include "cdd/schemes.hpp"
#include "cdd/spin.hpp"

namespace cdd {

enum class InitialState { scheme_default, zero, one, plus_x, minus_x, plus_y, minus_y };

inline const char* to_string(InitialState s) {
    switch (s) {
        case InitialState::scheme_default: return "auto";
        case InitialState::zero: return "zero";
        case InitialState::one: return "one";
        case InitialState::plus_x: return "plus_x";
        case InitialState::minus_x: return "minus_x";
        case InitialState::plus_y: return "plus_y";
        case InitialState::minus_y: return "minus_y";
    }
    return "?";
}

struct ExperimentConfig {
    SchemeSpec scheme;
    std::optional<SignalSpec> signal;
    bool signal_in_reference = true;  // magnetometry disables this so the
                                      // reference evolves without the signal
    double duration = 10.0;           // us
    double dt = 0.01;                 // us
    std::size_t stride = 1;           // steps between recorded samples
    std::size_t n_traj = 1;
    std::uint64_t master_seed = 1;
    OuParams noise_b{25.0, 0.0};
    OuParams noise_d1{500.0, 0.0};
    OuParams noise_d2{500.0, 0.0};
    InitialState initial_state = InitialState::scheme_default;
    unsigned workers = 0;             // 0 = available parallelism
};

inline std::size_t step_count(const ExperimentConfig& cfg) {
    return static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
}

inline std::size_t sample_count(const ExperimentConfig& cfg) {
    return step_count(cfg) / cfg.stride + 1;
}

// Effective noise channels: a channel is active only when toggled on and
// the scheme couples to it.
inline bool channel_b_active(const ExperimentConfig& cfg) {
    return cfg.scheme.noise_b && cfg.noise_b.sigma > 0.0;
}
inline bool channel_d1_active(const ExperimentConfig& cfg) {
    return cfg.scheme.noise_d1 && cfg.scheme.kind != SchemeKind::free &&
           cfg.noise_d1.sigma > 0.0;
}
inline bool channel_d2_active(const ExperimentConfig& cfg) {
    return cfg.scheme.noise_d2 && cfg.scheme.kind == SchemeKind::double_drive &&
           cfg.noise_d2.sigma > 0.0;
}

inline void validate_config(const ExperimentConfig& cfg) {
    validate(cfg.scheme, cfg.signal);
    if (!(cfg.duration > 0.0)) throw std::invalid_argument("duration must be > 0");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    const double steps_real = cfg.duration / cfg.dt;
    const auto steps = static_cast<std::size_t>(std::llround(steps_real));
    if (steps == 0) throw std::invalid_argument("duration < dt");
    if (std::abs(static_cast<double>(steps) * cfg.dt - cfg.duration) > 1e-9 * cfg.duration)
        throw std::invalid_argument("duration must be an integer multiple of dt");
    if (cfg.stride == 0 || steps % cfg.stride != 0)
        throw std::invalid_argument("stride must divide duration/dt");
    if (cfg.n_traj < 1) throw std::invalid_argument("trajectories must be >= 1");
    const double wmax = fastest_frequency(cfg.scheme, cfg.signal);
    if (cfg.dt * wmax > 0.05 + 1e-12)
        throw std::invalid_argument("dt too coarse: dt * fastest frequency must be <= 0.05 rad");
    validate(cfg.noise_b);
    validate(cfg.noise_d1);
    validate(cfg.noise_d2);
}

inline SpinState resolve_initial_state(const ExperimentConfig& cfg) {
    switch (cfg.initial_state) {
        case InitialState::zero: return state_zero();
        case InitialState::one: return state_one();
        case InitialState::plus_x: return state_plus_x();
        case InitialState::minus_x: return state_minus_x();
        case InitialState::plus_y: return state_plus_y();
        case InitialState::minus_y: return state_minus_y();
        case InitialState::scheme_default: break;
    }
    // Defaults probe each scheme's protected coherence: free and the
    // doubly-protected schemes start in a superposition transverse to the
    // relevant gap (|+x> is transverse to the double-dressed sigma_z gap at
    // t = 0), the single drive starts in |0>, a superposition of the
    // dressed |+-x> states.
    switch (cfg.scheme.kind) {
        case SchemeKind::free: return state_plus_x();
        case SchemeKind::single: return state_zero();
        case SchemeKind::double_drive:
        case SchemeKind::tdd: return state_plus_x();
    }
    return state_zero();
}

namespace detail {

// Noiseless reference states at the sample instants.
inline std::vector<SpinState> reference_states(const ExperimentConfig& cfg) {
    const std::size_t steps = step_count(cfg);
    const std::optional<SignalSpec> signal =
        cfg.signal_in_reference ? cfg.signal : std::nullopt;
    std::vector<SpinState> out;
    out.reserve(steps / cfg.stride + 1);
    SpinState s = resolve_initial_state(cfg);
    out.push_back(s);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * cfg.dt;
        s = evolve_step(s, hamiltonian_at(t_mid, cfg.scheme, signal, 0.0, 0.0, 0.0), cfg.dt);
        if ((k + 1) % cfg.stride == 0) out.push_back(s);
    }
    return out;
}

// One noisy trajectory against a precomputed reference; writes
// sample_count(cfg) fidelities into out.
inline void noisy_series(const ExperimentConfig& cfg, std::uint64_t index,
                         const std::vector<SpinState>& reference, double* out) {
    const std::size_t steps = step_count(cfg);
    const bool use_b = channel_b_active(cfg);
    const bool use_d1 = channel_d1_active(cfg);
    const bool use_d2 = channel_d2_active(cfg);

    RngStream rng_b = make_channel_stream(cfg.master_seed, index, NoiseChannel::magnetic);
    RngStream rng_d1 = make_channel_stream(cfg.master_seed, index, NoiseChannel::drive1);
    RngStream rng_d2 = make_channel_stream(cfg.master_seed, index, NoiseChannel::drive2);
    const OuStepper step_b(cfg.noise_b, cfg.dt);
    const OuStepper step_d1(cfg.noise_d1, cfg.dt);
    const OuStepper step_d2(cfg.noise_d2, cfg.dt);

    double b = use_b ? ou_init(cfg.noise_b, rng_b) : 0.0;
    double d1 = use_d1 ? ou_init(cfg.noise_d1, rng_d1) : 0.0;
    double d2 = use_d2 ? ou_init(cfg.noise_d2, rng_d2) : 0.0;

    SpinState s = resolve_initial_state(cfg);
    std::size_t sample = 0;
    out[sample++] = 1.0;  // F(0) by construction
    for (std::size_t k = 0; k < steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * cfg.dt;
        // Noise values are held constant across the step; drives are
        // sampled at the midpoint.
        s = evolve_step(s, hamiltonian_at(t_mid, cfg.scheme, cfg.signal, b, d1, d2), cfg.dt);
        if (use_b) b = step_b.step(b, rng_b);
        if (use_d1) d1 = step_d1.step(d1, rng_d1);
        if (use_d2) d2 = step_d2.step(d2, rng_d2);
        if ((k + 1) % cfg.stride == 0) {
            out[sample] = fidelity(reference[sample], s);
            ++sample;
        }
    }
}

} // namespace detail

// Fidelity series of a single trajectory; a pure function of (cfg, index).
inline std::vector<double> run_trajectory(const ExperimentConfig& cfg, std::uint64_t index) {
    validate_config(cfg);
    const std::vector<SpinState> reference = detail::reference_states(cfg);
    std::vector<double> out(sample_count(cfg));
    detail::noisy_series(cfg, index, reference, out.data());
    return out;
}

// Trajectory-parallel ensemble; mean and standard error of the mean are
// accumulated in trajectory-index order, so the curve is bitwise identical
// for any worker count.
inline DecayCurve run_ensemble(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const std::size_t n_samples = sample_count(cfg);
    const std::size_t n = cfg.n_traj;
    const std::vector<SpinState> reference = detail::reference_states(cfg);

    std::vector<double> buffer(n * n_samples);
    unsigned workers = cfg.workers != 0 ? cfg.workers : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        try {
            for (;;) {
                const std::uint64_t i = next.fetch_add(1);
                if (i >= n) break;
                detail::noisy_series(cfg, i, reference, buffer.data() + i * n_samples);
            }
        } catch (...) {
            std::scoped_lock lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    DecayCurve curve;
    curve.times.resize(n_samples);
    curve.mean.resize(n_samples);
    curve.sem.resize(n_samples);
    for (std::size_t j = 0; j < n_samples; ++j)
        curve.times[j] = static_cast<double>(j * cfg.stride) * cfg.dt;
    for (std::size_t j = 0; j < n_samples; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += buffer[i * n_samples + j];
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = buffer[i * n_samples + j] - mean;
            sq += d * d;
        }
        curve.mean[j] = mean;
        curve.sem[j] = n > 1 ? std::sqrt(sq / (static_cast<double>(n - 1) * static_cast<double>(n)))
                             : 0.0;
    }
    return curve;
}

// Dominant oscillation of a recorded curve: least-squares sinusoid fit.
struct SignalEstimate {
    double frequency = 0.0;  // rad/us
    double amplitude = 0.0;
};

inline SignalEstimate extract_signal(const DecayCurve& curve) {
    const SinusoidFit fit = fit_sinusoid(curve.times, curve.mean);
    return {fit.omega, fit.amplitude};
}

// ---------------------------------------------------------------------------
// Magnetometry protocols on the tdd scheme.

enum class MagnetometryApproach { z, x };
enum class MagnetometryProtocol { rabi, ramsey };

inline const char* to_string(MagnetometryApproach a) {
    return a == MagnetometryApproach::z ? "z" : "x";
}
inline const char* to_string(MagnetometryProtocol p) {
    return p == MagnetometryProtocol::rabi ? "rabi" : "ramsey";
}

struct MagnetometryResult {
    DecayCurve curve;
    double omega_d = 0.0;          // resolved signal frequency (rad/us)
    double curve_frequency = 0.0;  // fitted oscillation of the fidelity curve
    double signal_rate = 0.0;      // curve_frequency / 2, see note below
    double amplitude = 0.0;
};

// Runs a magnetometry protocol. The sensing signal acts only on the probe
// state while the reference evolves signal-free, so the fidelity develops
// an oscillation. A signal term kappa*sigma in the double-dressed frame
// separates the two eigenphases at rate 2*kappa, hence the fidelity
// oscillates at 2*kappa; signal_rate reports kappa (the Rabi rate g/4, or
// the per-level Ramsey shift: g/2 for the z approach, g/4 for x).
//
// detuning_sign selects between the two equivalent resonance conditions
// (+1: omega_d below the reference frequency).
inline MagnetometryResult run_magnetometry(ExperimentConfig cfg,
                                           MagnetometryApproach approach,
                                           MagnetometryProtocol protocol,
                                           int detuning_sign = +1) {
    if (cfg.scheme.kind != SchemeKind::tdd)
        throw std::invalid_argument("magnetometry runs on the tdd scheme");
    if (detuning_sign != 1 && detuning_sign != -1)
        throw std::invalid_argument("detuning_sign must be +1 or -1");
    SignalSpec signal = cfg.signal ? *cfg.signal : SignalSpec{};
    const double g = signal.g;
    if (g >= cfg.scheme.omega2 / 5.0)
        throw std::invalid_argument(
            "protocol validity requires g << Omega2 (rejecting g >= Omega2/5)");

    const double sign = static_cast<double>(detuning_sign);
    if (approach == MagnetometryApproach::z) {
        signal.axis = SignalAxis::z;
        signal.omega_d = protocol == MagnetometryProtocol::ramsey
                             ? cfg.scheme.omega1
                             : cfg.scheme.omega1 - sign * cfg.scheme.omega2;
    } else {
        signal.axis = SignalAxis::x;
        signal.omega_d = protocol == MagnetometryProtocol::ramsey
                             ? cfg.scheme.omega0 - sign * cfg.scheme.omega1
                             : cfg.scheme.omega0 - sign * cfg.scheme.omega2;
    }
    cfg.signal = signal;
    cfg.signal_in_reference = false;

    if (cfg.initial_state == InitialState::scheme_default) {
        // Rabi drives the double-dressed poles; Ramsey reads a phase, so it
        // needs a superposition across the double-dressed gap.
        cfg.initial_state = protocol == MagnetometryProtocol::rabi
                                ? InitialState::zero
                                : InitialState::plus_x;
    }
    if (!channel_b_active(cfg) && !channel_d1_active(cfg) && !channel_d2_active(cfg))
        cfg.n_traj = 1;  // noiseless run is deterministic

    MagnetometryResult result;
    result.curve = run_ensemble(cfg);
    result.omega_d = signal.omega_d;
    try {
        const SignalEstimate est = extract_signal(result.curve);
        result.curve_frequency = est.frequency;
        result.signal_rate = 0.5 * est.frequency;
        result.amplitude = est.amplitude;
    } catch (const FitError&) {
        if (g != 0.0) throw;  // a flat curve is the expected g = 0 outcome
    }
    return result;
}

} // namespace cdd
