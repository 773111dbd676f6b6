// sweep.hpp -- repeat simulate + fit over a list of values for one config key.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "cdd/analysis.hpp"
#include "cdd/config.hpp"
#include "cdd/experiment.hpp"

namespace cdd {

struct SweepRow {
    double value = 0.0;
    double final_mean = 0.0;  // mean fidelity at the last recorded time
    double final_sem = 0.0;
    bool fitted = false;      // false when the curve was unfittable
    FitResult fit;
};

// Later keys override earlier ones, so appending "key=value" applies the
// override on top of the base configuration.
inline std::vector<SweepRow> run_sweep(const std::string& config_text, const std::string& key,
                                       const std::vector<double>& values) {
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        const ParsedConfig pc = parse_config(config_text + "\n" + key + "=" + buf + "\n");
        SweepRow row;
        row.value = v;
        const DecayCurve curve = run_ensemble(pc.experiment);
        row.final_mean = curve.mean.back();
        row.final_sem = curve.sem.back();
        try {
            row.fit = model_select(curve);
            row.fitted = true;
        } catch (const FitError&) {
            row.fitted = false;
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& key) {
    std::string out = key + ",final_mean,final_sem,model,t2_us,residual_rms,uncertainty_us\n";
    char buf[256];
    for (const SweepRow& r : rows) {
        if (r.fitted) {
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%s,%.9g,%.9g,%.9g\n", r.value,
                          r.final_mean, r.final_sem, to_string(r.fit.model), r.fit.t2,
                          r.fit.residual_rms, r.fit.fit_uncertainty);
        } else {
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,none,nan,nan,nan\n", r.value,
                          r.final_mean, r.final_sem);
        }
        out += buf;
    }
    return out;
}

} // namespace cdd
