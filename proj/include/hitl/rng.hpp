#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hitl {

// Counter-based random stream. Draw i of stream (seed, stream_id) is a pure
// function of (seed, stream_id, i), so trials can be assigned streams up
// front and run in any order or thread layout without changing results.
//
// Core is the splitmix64 construction: a 64-bit key derived from
// (seed, stream_id) plus a Weyl-sequence counter, pushed through the
// Stafford mix13 finalizer.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id),
          key_(mix64(mix64(seed + kGolden) ^ mix64(stream_id + 2 * kGolden))) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Child stream, statistically independent of the parent and of other
    // children. Depends only on the key, not on how much has been drawn.
    RngStream substream(std::uint64_t child) const {
        RngStream s = *this;
        s.key_ = mix64(key_ ^ mix64(child + 3 * kGolden));
        s.counter_ = 0;
        s.have_spare_ = false;
        return s;
    }

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via Box-Muller; the paired sample is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the log finite.
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double gaussian(double stddev) { return stddev * gaussian(); }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
    static constexpr double kPi = 3.14159265358979323846;

    // Stafford mix13 finalizer.
    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline RngStream derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
    return RngStream(seed, stream_id);
}

// i.i.d. Normal(0, dt) increments, the discrete Wiener steps.
inline std::vector<double> gaussian_increments(RngStream& rng, double dt, std::size_t n) {
    if (!(dt > 0.0))
        throw std::invalid_argument("gaussian_increments: invalid grid, dt must be > 0");
    const double sd = std::sqrt(dt);
    std::vector<double> out(n);
    for (auto& w : out) w = rng.gaussian(sd);
    return out;
}

}  // namespace hitl
