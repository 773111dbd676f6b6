// config.hpp -- flat key = value experiment configuration.
//
// All frequency-like inputs are angular (rad/us) by default;
// frequency_convention=cyclic multiplies them by 2*pi on input. Times
// (t2_star, tau_b, tau_omega, duration, dt) are microseconds either way.
// Later occurrences of a key override earlier ones; '#' starts a comment,
// so a run manifest is itself a valid config.

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdd/experiment.hpp"
#include "cdd/version.hpp"

namespace cdd {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ParsedConfig {
    ExperimentConfig experiment;
    // Raw noise inputs, preserved for manifests.
    double t2_star = 3.0;
    double tau_b = 25.0;
    double delta_omega = 0.005;
    double tau_omega = 500.0;
    std::string frequency_convention = "angular";
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v.empty()) throw ConfigError("invalid value for " + key + ": empty");
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size())
        throw ConfigError("invalid value for " + key + ": '" + value + "'");
    return x;
}

inline std::uint64_t parse_integer(const std::string& key, const std::string& value) {
    const double x = parse_number(key, value);
    if (!(x >= 0.0) || x != std::floor(x) || x > 9.007199254740992e15)
        throw ConfigError("invalid value for " + key + ": expected a non-negative integer");
    return static_cast<std::uint64_t>(x);
}

inline bool parse_toggle(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("invalid value for " + key + ": expected on/off");
}

// Largest step from a fixed ladder satisfying dt * wmax <= 0.05.
inline double default_dt(double wmax, double duration) {
    if (wmax <= 0.0) return duration / 1000.0;
    static constexpr double ladder[] = {0.02,  0.01,  0.005, 0.002, 0.001, 5e-4,
                                        2e-4,  1e-4,  5e-5,  2e-5,  1e-5,  5e-6,
                                        2e-6,  1e-6,  5e-7,  2e-7,  1e-7};
    for (double dt : ladder)
        if (dt * wmax <= 0.05) return dt;
    return 0.05 / wmax;
}

// Largest divisor of steps that keeps about 500 recorded samples.
inline std::size_t default_stride(std::size_t steps) {
    std::size_t want = steps / 500;
    if (want < 1) want = 1;
    for (std::size_t s = want; s > 1; --s)
        if (steps % s == 0) return s;
    return 1;
}

} // namespace detail

inline ParsedConfig parse_config(const std::string& text) {
    static const std::map<std::string, int> known = {
        {"scheme", 0},        {"omega0", 0},         {"omega1", 0},
        {"omega2", 0},        {"second_drive_freq", 0}, {"t2_star", 0},
        {"tau_b", 0},         {"delta_omega", 0},    {"tau_omega", 0},
        {"duration", 0},      {"dt", 0},             {"stride", 0},
        {"trajectories", 0},  {"seed", 0},           {"rwa_mode", 0},
        {"signal_axis", 0},   {"signal_g", 0},       {"signal_omega_d", 0},
        {"initial_state", 0}, {"noise_b", 0},        {"noise_d1", 0},
        {"noise_d2", 0},      {"frequency_convention", 0},
    };

    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("malformed line (expected key = value): '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!known.count(key)) throw ConfigError("unknown key: " + key);
        kv[key] = value;  // later lines override earlier ones
    }

    auto has = [&](const char* k) { return kv.count(k) != 0; };
    auto num = [&](const char* k, double dflt) {
        return has(k) ? detail::parse_number(k, kv[k]) : dflt;
    };

    ParsedConfig out;
    ExperimentConfig& cfg = out.experiment;

    if (!has("scheme")) throw ConfigError("scheme missing");
    {
        const std::string s = kv["scheme"];
        if (s == "free") cfg.scheme.kind = SchemeKind::free;
        else if (s == "single") cfg.scheme.kind = SchemeKind::single;
        else if (s == "double") cfg.scheme.kind = SchemeKind::double_drive;
        else if (s == "tdd") cfg.scheme.kind = SchemeKind::tdd;
        else throw ConfigError("invalid value for scheme: '" + s + "' (free|single|double|tdd)");
    }

    out.frequency_convention = has("frequency_convention") ? detail::trim(kv["frequency_convention"]) : "angular";
    double unit = 1.0;
    if (out.frequency_convention == "cyclic") unit = 2.0 * 3.141592653589793238462643383279502884;
    else if (out.frequency_convention != "angular")
        throw ConfigError("invalid value for frequency_convention: expected angular|cyclic");

    cfg.scheme.omega0 = unit * num("omega0", 1000.0 / unit);
    cfg.scheme.omega1 = unit * num("omega1", 10.0);
    cfg.scheme.omega2 = unit * num("omega2", 1.0);
    cfg.scheme.second_drive_freq =
        has("second_drive_freq") ? unit * detail::parse_number("second_drive_freq", kv["second_drive_freq"])
                                 : cfg.scheme.omega1;

    if (has("rwa_mode")) {
        const std::string m = kv["rwa_mode"];
        if (m == "rwa") cfg.scheme.rwa_mode = RwaMode::rwa;
        else if (m == "counter_rotating" || m == "counter-rotating")
            cfg.scheme.rwa_mode = RwaMode::counter_rotating;
        else throw ConfigError("invalid value for rwa_mode: expected rwa|counter_rotating");
    }

    out.t2_star = num("t2_star", 3.0);
    out.tau_b = num("tau_b", 25.0);
    out.delta_omega = num("delta_omega", 0.005);
    out.tau_omega = num("tau_omega", 500.0);
    if (!(out.t2_star > 0.0)) throw ConfigError("invalid value for t2_star: must be > 0");
    if (!(out.tau_b > 0.0)) throw ConfigError("invalid value for tau_b: must be > 0");
    if (!(out.delta_omega >= 0.0)) throw ConfigError("invalid value for delta_omega: must be >= 0");
    if (!(out.tau_omega > 0.0)) throw ConfigError("invalid value for tau_omega: must be > 0");
    cfg.noise_b = magnetic_noise_params(out.t2_star, out.tau_b);
    cfg.noise_d1 = drive_noise_params(out.delta_omega, out.tau_omega);
    cfg.noise_d2 = drive_noise_params(out.delta_omega, out.tau_omega);

    cfg.scheme.noise_b = has("noise_b") ? detail::parse_toggle("noise_b", kv["noise_b"]) : true;
    cfg.scheme.noise_d1 = has("noise_d1") ? detail::parse_toggle("noise_d1", kv["noise_d1"]) : true;
    // The tdd detuning is generated noiselessly; its channel defaults off
    // and may not be switched on.
    const bool d2_default = cfg.scheme.kind != SchemeKind::tdd;
    cfg.scheme.noise_d2 = has("noise_d2") ? detail::parse_toggle("noise_d2", kv["noise_d2"]) : d2_default;

    if (has("signal_g") || has("signal_omega_d") || has("signal_axis")) {
        SignalSpec sig;
        const std::string axis = has("signal_axis") ? detail::trim(kv["signal_axis"]) : "z";
        if (axis == "z") sig.axis = SignalAxis::z;
        else if (axis == "x") sig.axis = SignalAxis::x;
        else throw ConfigError("invalid value for signal_axis: expected z|x");
        sig.g = unit * num("signal_g", 0.0);
        // an unset x-signal frequency means resonance with the bare splitting
        const double omega_d_default = sig.axis == SignalAxis::x ? cfg.scheme.omega0 / unit : 0.0;
        sig.omega_d = unit * num("signal_omega_d", omega_d_default);
        if (!(sig.g >= 0.0)) throw ConfigError("invalid value for signal_g: must be >= 0");
        cfg.signal = sig;
    }

    if (has("initial_state")) {
        const std::string s = detail::trim(kv["initial_state"]);
        if (s == "auto") cfg.initial_state = InitialState::scheme_default;
        else if (s == "zero") cfg.initial_state = InitialState::zero;
        else if (s == "one") cfg.initial_state = InitialState::one;
        else if (s == "plus_x") cfg.initial_state = InitialState::plus_x;
        else if (s == "minus_x") cfg.initial_state = InitialState::minus_x;
        else if (s == "plus_y") cfg.initial_state = InitialState::plus_y;
        else if (s == "minus_y") cfg.initial_state = InitialState::minus_y;
        else throw ConfigError("invalid value for initial_state: '" + s + "'");
    }

    static constexpr double default_duration[] = {10.0, 200.0, 1500.0, 3000.0};
    cfg.duration = num("duration", default_duration[static_cast<int>(cfg.scheme.kind)]);
    if (!(cfg.duration > 0.0)) throw ConfigError("invalid value for duration: must be > 0");

    const double wmax = fastest_frequency(cfg.scheme, cfg.signal);
    cfg.dt = num("dt", detail::default_dt(wmax, cfg.duration));
    if (!(cfg.dt > 0.0)) throw ConfigError("invalid value for dt: must be > 0");

    const double steps_real = cfg.duration / cfg.dt;
    const auto steps = static_cast<std::size_t>(std::llround(steps_real));
    if (steps == 0 || std::abs(static_cast<double>(steps) * cfg.dt - cfg.duration) > 1e-9 * cfg.duration)
        throw ConfigError("duration must be an integer multiple of dt");

    cfg.stride = has("stride") ? static_cast<std::size_t>(detail::parse_integer("stride", kv["stride"]))
                               : detail::default_stride(steps);
    cfg.n_traj = has("trajectories")
                     ? static_cast<std::size_t>(detail::parse_integer("trajectories", kv["trajectories"]))
                     : 1000;
    cfg.master_seed = has("seed") ? detail::parse_integer("seed", kv["seed"]) : 1;

    try {
        out.warnings = validate(cfg.scheme, cfg.signal);
        validate_config(cfg);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return out;
}

// Renders the fully resolved configuration; parsing it back reproduces the
// run bitwise. Frequencies are written in angular units.
inline std::string render_config(const ParsedConfig& pc) {
    const ExperimentConfig& cfg = pc.experiment;
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::string s;
    s += "scheme=" + std::string(to_string(cfg.scheme.kind)) + "\n";
    s += "frequency_convention=angular\n";
    s += "omega0=" + fmt(cfg.scheme.omega0) + "\n";
    s += "omega1=" + fmt(cfg.scheme.omega1) + "\n";
    s += "omega2=" + fmt(cfg.scheme.omega2) + "\n";
    s += "second_drive_freq=" + fmt(cfg.scheme.second_drive_freq) + "\n";
    s += "rwa_mode=" + std::string(cfg.scheme.rwa_mode == RwaMode::rwa ? "rwa" : "counter_rotating") + "\n";
    s += "t2_star=" + fmt(pc.t2_star) + "\n";
    s += "tau_b=" + fmt(pc.tau_b) + "\n";
    s += "delta_omega=" + fmt(pc.delta_omega) + "\n";
    s += "tau_omega=" + fmt(pc.tau_omega) + "\n";
    s += "noise_b=" + std::string(cfg.scheme.noise_b ? "on" : "off") + "\n";
    s += "noise_d1=" + std::string(cfg.scheme.noise_d1 ? "on" : "off") + "\n";
    s += "noise_d2=" + std::string(cfg.scheme.noise_d2 ? "on" : "off") + "\n";
    if (cfg.signal) {
        s += "signal_axis=" + std::string(cfg.signal->axis == SignalAxis::z ? "z" : "x") + "\n";
        s += "signal_g=" + fmt(cfg.signal->g) + "\n";
        s += "signal_omega_d=" + fmt(cfg.signal->omega_d) + "\n";
    }
    s += "initial_state=" + std::string(to_string(cfg.initial_state)) + "\n";
    s += "duration=" + fmt(cfg.duration) + "\n";
    s += "dt=" + fmt(cfg.dt) + "\n";
    s += "stride=" + std::to_string(cfg.stride) + "\n";
    s += "trajectories=" + std::to_string(cfg.n_traj) + "\n";
    s += "seed=" + std::to_string(cfg.master_seed) + "\n";
    return s;
}

} // namespace cdd
