// curve.hpp -- ensemble-averaged decay curve with standard errors.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cdd {

struct DecayCurve {
    std::vector<double> times;  // us, strictly increasing, times[0] = 0
    std::vector<double> mean;   // fidelity, mean[0] = 1
    std::vector<double> sem;    // standard error of the mean, >= 0

    std::size_t size() const { return times.size(); }
};

inline void check_invariants(const DecayCurve& c) {
    if (c.times.size() != c.mean.size() || c.times.size() != c.sem.size())
        throw std::invalid_argument("DecayCurve: column lengths differ");
    if (c.times.empty()) return;
    if (c.mean[0] != 1.0) throw std::invalid_argument("DecayCurve: mean[0] must be 1");
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!(c.mean[i] >= 0.0 && c.mean[i] <= 1.0))
            throw std::invalid_argument("DecayCurve: mean out of [0,1]");
        if (!(c.sem[i] >= 0.0)) throw std::invalid_argument("DecayCurve: negative sem");
        if (i > 0 && !(c.times[i] > c.times[i - 1]))
            throw std::invalid_argument("DecayCurve: times must be strictly increasing");
    }
}

} // namespace cdd
