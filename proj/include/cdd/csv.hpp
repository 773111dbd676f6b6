// csv.hpp -- curve serialization and plot-script emission.
//
// Curves are written as "t_us,mean,sem" with 9 significant digits and LF
// line endings; identical inputs produce identical bytes.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

#include "cdd/curve.hpp"

namespace cdd {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string curve_to_csv(const DecayCurve& curve) {
    std::string out = "t_us,mean,sem\n";
    char buf[128];
    for (std::size_t i = 0; i < curve.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", curve.times[i], curve.mean[i],
                      curve.sem[i]);
        out += buf;
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

inline void write_curve_csv(const DecayCurve& curve, const std::string& path) {
    write_text_file(path, curve_to_csv(curve));
}

inline DecayCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_us,mean,sem") throw IoError("unexpected header in " + path + ": '" + line + "'");
    DecayCurve curve;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double v[3];
        const char* p = line.c_str();
        for (int col = 0; col < 3; ++col) {
            char* end = nullptr;
            v[col] = std::strtod(p, &end);
            if (end == p)
                throw IoError(path + ":" + std::to_string(line_no) + ": malformed row");
            p = end;
            if (col < 2) {
                if (*p != ',')
                    throw IoError(path + ":" + std::to_string(line_no) + ": expected 3 columns");
                ++p;
            }
        }
        curve.times.push_back(v[0]);
        curve.mean.push_back(v[1]);
        curve.sem.push_back(v[2]);
    }
    return curve;
}

// Gnuplot script rendering mean +- sem, with an optional reference curve csv.
inline std::string plot_script(const std::string& curve_csv, const std::string& overlay_csv = "",
                               const std::string& title = "ensemble fidelity") {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set xlabel 't (us)'\n";
    s += "set ylabel 'fidelity'\n";
    s += "set yrange [0:1.05]\n";
    s += "set key left bottom\n";
    s += "set title '" + title + "'\n";
    s += "plot '" + curve_csv + "' skip 1 using 1:2:3 with yerrorlines pointsize 0.2 title 'simulation'";
    if (!overlay_csv.empty())
        s += ", \\\n     '" + overlay_csv + "' skip 1 using 1:2 with lines lw 2 title 'reference'";
    s += "\n";
    return s;
}

} // namespace cdd
