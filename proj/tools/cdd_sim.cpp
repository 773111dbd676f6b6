// cdd_sim -- command-line driver for the dynamical-decoupling simulator.
//
// Subcommands: simulate, fit, magnetometry, analytic, sweep. All frequency
// inputs are angular (rad/us) unless the config sets
// frequency_convention=cyclic. Runs are reproducible: the manifest written
// next to an output is itself a valid config that regenerates the output
// byte for byte.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cdd/analysis.hpp"
#include "cdd/config.hpp"
#include "cdd/csv.hpp"
#include "cdd/experiment.hpp"
#include "cdd/sweep.hpp"
#include "cdd/version.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cdd::IoError("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

unsigned resolve_workers(unsigned cli_value) {
    if (cli_value != 0) return cli_value;
    if (const char* env = std::getenv("CDD_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 0;  // library default: available parallelism
}

void print_warnings(const cdd::ParsedConfig& pc) {
    for (const std::string& w : pc.warnings) std::cerr << "warning: " << w << "\n";
}

void write_manifest(const std::string& path, const cdd::ParsedConfig& pc,
                    const std::string& subcommand, const std::string& out_path,
                    double runtime_s) {
    std::string text;
    text += "# cdd_sim run manifest (valid as a config file)\n";
    text += "# meta: version=" + std::string(cdd::version_string) + "\n";
    text += "# meta: subcommand=" + subcommand + "\n";
    text += "# meta: out=" + out_path + "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "# meta: runtime_s=%.3f\n", runtime_s);
    text += buf;
    text += render_config(pc);
    cdd::write_text_file(path, text);
}

struct CommonOutputs {
    std::string out;
    std::string manifest;
    std::string plot;
    std::string overlay;
    unsigned workers = 0;
};

void add_output_options(CLI::App* cmd, CommonOutputs& o, bool with_overlay = true) {
    cmd->add_option("--out", o.out, "output curve csv")->required();
    cmd->add_option("--manifest", o.manifest, "write the resolved run manifest here");
    cmd->add_option("--emit-plot", o.plot, "write a gnuplot script for the output");
    if (with_overlay)
        cmd->add_option("--overlay", o.overlay, "reference csv to overlay in the plot script");
    cmd->add_option("--workers", o.workers, "worker threads (default: available parallelism)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator of a noisy driven two-level system"};
    app.require_subcommand(1);
    app.footer(
        "Frequencies are angular (rad/us); set frequency_convention=cyclic in the\n"
        "config to enter cyclic values that are multiplied by 2*pi on input.");

    // --- simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run an ensemble and write the decay curve");
    std::string sim_config;
    CommonOutputs sim_out;
    sim->add_option("--config", sim_config, "key = value config file")->required();
    add_output_options(sim, sim_out);

    // --- fit ---------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "fit a decay model to a curve csv");
    std::string fit_in, fit_model = "auto";
    bool fit_floor = false;
    fit->add_option("--in", fit_in, "curve csv")->required();
    fit->add_option("--model", fit_model, "gaussian|exponential|auto (default auto)");
    fit->add_flag("--fit-floor", fit_floor, "fit the asymptote instead of fixing it at 1/2");

    // --- magnetometry ------------------------------------------------------
    auto* mag = app.add_subcommand("magnetometry", "run a sensing protocol on the tdd scheme");
    std::string mag_config, mag_approach, mag_protocol, mag_sign = "+";
    CommonOutputs mag_out;
    mag->add_option("--config", mag_config, "key = value config file")->required();
    mag->add_option("--approach", mag_approach, "z|x (signal polarization)")->required();
    mag->add_option("--protocol", mag_protocol, "rabi|ramsey")->required();
    mag->add_option("--detuning-sign", mag_sign, "+|- resonance branch (default +)");
    add_output_options(mag, mag_out);

    // --- analytic ----------------------------------------------------------
    auto* ana = app.add_subcommand("analytic", "emit a reference decay curve");
    std::string ana_model;
    double ana_t2 = 0.0, ana_duration = 0.0, ana_dt = 0.0;
    std::string ana_out, ana_plot;
    ana->add_option("--model", ana_model, "gaussian|exponential")->required();
    ana->add_option("--t2", ana_t2, "coherence time (us)")->required();
    ana->add_option("--duration", ana_duration, "curve length (us)")->required();
    ana->add_option("--dt", ana_dt, "sample spacing (us)")->required();
    ana->add_option("--out", ana_out, "output csv")->required();
    ana->add_option("--emit-plot", ana_plot, "write a gnuplot script for the output");

    // --- sweep ---------------------------------------------------------------
    auto* swp = app.add_subcommand("sweep", "repeat simulate + fit over values of one key");
    std::string swp_config, swp_key, swp_values, swp_out;
    unsigned swp_workers = 0;
    swp->add_option("--config", swp_config, "key = value config file")->required();
    swp->add_option("--key", swp_key, "config key to sweep")->required();
    swp->add_option("--values", swp_values, "comma-separated values")->required();
    swp->add_option("--out", swp_out, "output csv")->required();
    swp->add_option("--workers", swp_workers, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            cdd::ParsedConfig pc = cdd::parse_config(read_file(sim_config));
            print_warnings(pc);
            pc.experiment.workers = resolve_workers(sim_out.workers);
            const auto t0 = std::chrono::steady_clock::now();
            const cdd::DecayCurve curve = cdd::run_ensemble(pc.experiment);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            cdd::write_curve_csv(curve, sim_out.out);
            if (!sim_out.manifest.empty())
                write_manifest(sim_out.manifest, pc, "simulate", sim_out.out, secs);
            if (!sim_out.plot.empty())
                cdd::write_text_file(sim_out.plot, cdd::plot_script(sim_out.out, sim_out.overlay));
            std::printf("{\"samples\":%zu,\"final_mean\":%.9g,\"runtime_s\":%.3f}\n",
                        curve.size(), curve.mean.back(), secs);
        } else if (*fit) {
            const cdd::DecayCurve curve = cdd::read_curve_csv(fit_in);
            cdd::FitOptions options;
            options.fit_floor = fit_floor;
            cdd::FitResult r;
            if (fit_model == "auto") {
                r = cdd::model_select(curve, options);
            } else if (fit_model == "gaussian") {
                r = cdd::fit_decay(curve, cdd::DecayModel::gaussian, options);
            } else if (fit_model == "exponential") {
                r = cdd::fit_decay(curve, cdd::DecayModel::exponential, options);
            } else {
                throw std::runtime_error("unknown model: " + fit_model);
            }
            std::printf(
                "{\"model\":\"%s\",\"t2_us\":%.9g,\"residual_rms\":%.9g,\"uncertainty_us\":%.9g}\n",
                cdd::to_string(r.model), r.t2, r.residual_rms, r.fit_uncertainty);
        } else if (*mag) {
            cdd::ParsedConfig pc = cdd::parse_config(read_file(mag_config));
            print_warnings(pc);
            pc.experiment.workers = resolve_workers(mag_out.workers);
            cdd::MagnetometryApproach approach;
            if (mag_approach == "z") approach = cdd::MagnetometryApproach::z;
            else if (mag_approach == "x") approach = cdd::MagnetometryApproach::x;
            else throw std::runtime_error("unknown approach: " + mag_approach + " (z|x)");
            cdd::MagnetometryProtocol protocol;
            if (mag_protocol == "rabi") protocol = cdd::MagnetometryProtocol::rabi;
            else if (mag_protocol == "ramsey") protocol = cdd::MagnetometryProtocol::ramsey;
            else throw std::runtime_error("unknown protocol: " + mag_protocol + " (rabi|ramsey)");
            int sign = +1;
            if (mag_sign == "-") sign = -1;
            else if (mag_sign != "+") throw std::runtime_error("detuning sign must be + or -");
            const auto t0 = std::chrono::steady_clock::now();
            const cdd::MagnetometryResult r =
                cdd::run_magnetometry(pc.experiment, approach, protocol, sign);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            cdd::write_curve_csv(r.curve, mag_out.out);
            if (!mag_out.manifest.empty())
                write_manifest(mag_out.manifest, pc, "magnetometry", mag_out.out, secs);
            if (!mag_out.plot.empty())
                cdd::write_text_file(mag_out.plot, cdd::plot_script(mag_out.out, mag_out.overlay));
            std::printf(
                "{\"approach\":\"%s\",\"protocol\":\"%s\",\"omega_d\":%.9g,"
                "\"curve_frequency\":%.9g,\"signal_rate\":%.9g,\"amplitude\":%.9g}\n",
                cdd::to_string(approach), cdd::to_string(protocol), r.omega_d,
                r.curve_frequency, r.signal_rate, r.amplitude);
        } else if (*ana) {
            cdd::DecayModel model;
            if (ana_model == "gaussian") model = cdd::DecayModel::gaussian;
            else if (ana_model == "exponential") model = cdd::DecayModel::exponential;
            else throw std::runtime_error("unknown model: " + ana_model);
            if (!(ana_t2 > 0.0) || !(ana_duration > 0.0) || !(ana_dt > 0.0))
                throw std::runtime_error("t2, duration and dt must be > 0");
            cdd::DecayCurve curve;
            const auto n = static_cast<std::size_t>(ana_duration / ana_dt);
            for (std::size_t i = 0; i <= n; ++i) {
                const double t = static_cast<double>(i) * ana_dt;
                curve.times.push_back(t);
                curve.mean.push_back(cdd::decay_model_value(model, t, ana_t2));
                curve.sem.push_back(0.0);
            }
            cdd::write_curve_csv(curve, ana_out);
            if (!ana_plot.empty())
                cdd::write_text_file(ana_plot, cdd::plot_script(ana_out, "", "reference decay"));
        } else if (*swp) {
            std::vector<double> values;
            std::stringstream ss(swp_values);
            std::string item;
            while (std::getline(ss, item, ',')) {
                char* end = nullptr;
                const double v = std::strtod(item.c_str(), &end);
                if (end == item.c_str()) throw std::runtime_error("bad sweep value: " + item);
                values.push_back(v);
            }
            if (values.empty()) throw std::runtime_error("no sweep values given");
            const std::string base = read_file(swp_config);
            std::vector<cdd::SweepRow> rows;
            for (double v : values) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                cdd::ParsedConfig pc = cdd::parse_config(base + "\n" + swp_key + "=" + buf + "\n");
                pc.experiment.workers = resolve_workers(swp_workers);
                cdd::SweepRow row;
                row.value = v;
                const cdd::DecayCurve curve = cdd::run_ensemble(pc.experiment);
                row.final_mean = curve.mean.back();
                row.final_sem = curve.sem.back();
                try {
                    row.fit = cdd::model_select(curve);
                    row.fitted = true;
                } catch (const cdd::FitError&) {
                    row.fitted = false;
                }
                rows.push_back(row);
            }
            cdd::write_text_file(swp_out, cdd::sweep_to_csv(rows, swp_key));
            for (const cdd::SweepRow& r : rows) {
                if (r.fitted)
                    std::printf("{\"%s\":%.9g,\"final_mean\":%.9g,\"model\":\"%s\",\"t2_us\":%.9g}\n",
                                swp_key.c_str(), r.value, r.final_mean, cdd::to_string(r.fit.model),
                                r.fit.t2);
                else
                    std::printf("{\"%s\":%.9g,\"final_mean\":%.9g,\"model\":\"none\"}\n",
                                swp_key.c_str(), r.value, r.final_mean);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
