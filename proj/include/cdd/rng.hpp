// rng.hpp -- reproducible per-trajectory random streams.
//
// Every noise channel of every trajectory owns its own RngStream,
// derived from (master seed, stream index). Identical (seed, index)
// reproduces the identical sequence bit for bit; distinct indices give
// statistically independent streams. Gaussians are produced by an
// explicit Box-Muller transform so the uniform->normal pipeline is
// fully specified here rather than delegated to the standard library
// (std::normal_distribution is implementation-defined).

#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace cdd {

namespace detail {

// splitmix64, used only to spread (seed, index) into mt19937_64 seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_seed_(master_seed), stream_index_(stream_index) {
        std::uint64_t s = master_seed ^ (stream_index * 0xD1342543DE82EF95ull);
        const std::uint64_t a = detail::splitmix64(s);
        const std::uint64_t b = detail::splitmix64(s);
        const std::uint64_t c = detail::splitmix64(s);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    // Uniform in (0, 1]; never returns 0 so log() below is safe.
    double uniform_pos() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; pairs are generated together and
    // the second member cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * pi_ * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    static constexpr double pi_ = 3.141592653589793238462643383279502884;
    std::uint64_t master_seed_ = 0;
    std::uint64_t stream_index_ = 0;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Noise channels of a trajectory. Stream indices are packed as
// 4*trajectory + channel so channels stay uncorrelated across and
// within trajectories.
enum class NoiseChannel : std::uint64_t {
    magnetic = 0,  // B(t)
    drive1 = 1,    // relative amplitude noise of the first drive
    drive2 = 2,    // relative amplitude noise of the second drive
};

inline RngStream make_channel_stream(std::uint64_t master_seed,
                                     std::uint64_t trajectory,
                                     NoiseChannel channel) {
    return RngStream(master_seed, trajectory * 4 + static_cast<std::uint64_t>(channel));
}

} // namespace cdd
