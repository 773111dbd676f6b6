#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "cdd/config.hpp"
#include "cdd/csv.hpp"
#include "cdd/experiment.hpp"
#include "cdd/sweep.hpp"

using namespace cdd;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("config requires a scheme") {
    CHECK_THROWS_WITH_AS(parse_config(""), "scheme missing", ConfigError);
}

TEST_CASE("defaults follow the standard parameter set") {
    const ParsedConfig pc = parse_config("scheme=tdd\ntrajectories=1000\n");
    const ExperimentConfig& cfg = pc.experiment;
    CHECK(cfg.scheme.kind == SchemeKind::tdd);
    CHECK(cfg.scheme.omega1 == 10.0);
    CHECK(cfg.scheme.omega2 == 1.0);
    CHECK(cfg.scheme.second_drive_freq == 10.0);
    CHECK(cfg.scheme.rwa_mode == RwaMode::rwa);
    CHECK(cfg.n_traj == 1000);
    CHECK(cfg.duration == 3000.0);
    CHECK(cfg.dt == 0.005);
    CHECK(cfg.scheme.noise_b);
    CHECK(cfg.scheme.noise_d1);
    CHECK(!cfg.scheme.noise_d2);  // tdd: detuning channel is noiseless
    CHECK(cfg.noise_b.sigma == doctest::Approx(0.47140452079103173));
    CHECK(cfg.noise_d1.sigma == 0.005);
    CHECK(pc.frequency_convention == "angular");
}

TEST_CASE("validation and parse errors name the offending key") {
    CHECK_THROWS_AS(parse_config("scheme=single\nomega2=20\nomega1=10\n"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("scheme=free\nbogus=1\n"), "unknown key: bogus",
                         ConfigError);
    CHECK_THROWS_AS(parse_config("scheme=free\nduration=ten\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("scheme=tdd\nnoise_d2=on\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("scheme=free\nfrequency_convention=hz\n"), ConfigError);
}

TEST_CASE("hierarchy violation is rejected for schemes with a second gap") {
    CHECK_THROWS_AS(parse_config("scheme=double\nomega2=20\n"), ConfigError);
    CHECK_NOTHROW(parse_config("scheme=double\nomega2=0.5\n"));
}

TEST_CASE("later keys override earlier ones") {
    const ParsedConfig pc = parse_config("scheme=free\nseed=1\nseed=7\n");
    CHECK(pc.experiment.master_seed == 7);
}

TEST_CASE("cyclic frequency convention multiplies frequencies by 2 pi") {
    const ParsedConfig pc =
        parse_config("scheme=single\nfrequency_convention=cyclic\nomega1=10\n");
    CHECK(pc.experiment.scheme.omega1 == doctest::Approx(62.83185307179586).epsilon(1e-12));
    // times are untouched
    CHECK(pc.t2_star == 3.0);
    // the dt rule follows the scaled frequency
    CHECK(pc.experiment.dt * pc.experiment.scheme.omega1 <= 0.05 + 1e-12);
}

TEST_CASE("manifest round-trip reproduces the configuration") {
    const ParsedConfig pc = parse_config(
        "scheme=double\nomega2=0.8\ntrajectories=42\nseed=99\nsignal_axis=z\nsignal_g=0.01\n"
        "signal_omega_d=10\ninitial_state=plus_x\n");
    const std::string text = render_config(pc);
    const ParsedConfig again = parse_config(text);
    CHECK(render_config(again) == text);
    CHECK(again.experiment.scheme.omega2 == pc.experiment.scheme.omega2);
    CHECK(again.experiment.master_seed == pc.experiment.master_seed);
    CHECK(again.experiment.signal->g == pc.experiment.signal->g);
    CHECK(again.experiment.initial_state == InitialState::plus_x);
    // manifests carry comment lines; the parser must skip them
    CHECK_NOTHROW(parse_config("# meta: version=x\n" + text));
}

TEST_CASE("curve csv round trip is byte-identical") {
    ExperimentConfig cfg;
    cfg.scheme.kind = SchemeKind::free;
    cfg.noise_b = magnetic_noise_params(3.0, 25.0);
    cfg.duration = 10.0;
    cfg.dt = 0.01;
    cfg.stride = 2;
    cfg.n_traj = 25;
    const DecayCurve curve = run_ensemble(cfg);
    CHECK(curve.size() == 501);  // duration/dt/stride + 1 rows

    const std::string path = temp_path("cdd_test_curve.csv");
    write_curve_csv(curve, path);
    const DecayCurve back = read_curve_csv(path);
    CHECK(back.size() == curve.size());
    const std::string path2 = temp_path("cdd_test_curve2.csv");
    write_curve_csv(back, path2);

    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(s1.substr(0, 14) == "t_us,mean,sem\n");
    CHECK(s1.find('\r') == std::string::npos);

    const DecayCurve empty;
    write_curve_csv(empty, path);
    std::ifstream f3(path, std::ios::binary);
    std::string s3((std::istreambuf_iterator<char>(f3)), std::istreambuf_iterator<char>());
    CHECK(s3 == "t_us,mean,sem\n");

    CHECK_THROWS_AS(read_curve_csv("/nonexistent/tree/file.csv"), IoError);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("plot script references the data") {
    const std::string script = plot_script("out.csv", "ref.csv");
    CHECK(script.find("out.csv") != std::string::npos);
    CHECK(script.find("ref.csv") != std::string::npos);
    CHECK(script.find("yerrorlines") != std::string::npos);
}

TEST_CASE("sweep applies overrides and reports fits") {
    const std::string base =
        "scheme=free\nduration=8\ndt=0.01\nstride=4\ntrajectories=60\nseed=11\n";
    const std::vector<SweepRow> rows = run_sweep(base, "t2_star", {3.0, 6.0});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].value == 3.0);
    CHECK(rows[1].value == 6.0);
    CHECK(rows[0].final_mean < rows[1].final_mean);  // longer T2* decays less by t = 8
    const std::string csv = sweep_to_csv(rows, "t2_star");
    CHECK(csv.find("t2_star,final_mean") == 0);
}
