#include "oprisk/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oprisk {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
    // Fixed derivation rule: fold the stream id into the master seed, then
    // expand with splitmix64. Part of the reproducibility contract.
    std::uint64_t s = master_seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1));
    for (auto& w : state_) {
        w = splitmix64(s);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
        state_[0] = 0x9E3779B97F4A7C15ULL;
    }
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform01_open_low() {
    return 1.0 - uniform01();
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("exponential: rate must be positive");
    }
    return -std::log(uniform01_open_low()) / rate;
}

double RngStream::normal01() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01_open_low()));
    const double theta = kTwoPi * uniform01();
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0)) {
        throw std::invalid_argument("gamma: shape must be positive");
    }
    if (shape < 1.0) {
        // Boost to shape + 1 and scale back by U^(1/shape).
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform01_open_low(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal01();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01_open_low();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

double RngStream::beta(double a, double b) {
    if (std::isinf(a)) {
        return 1.0;
    }
    if (std::isinf(b)) {
        return 0.0;
    }
    const double ga = gamma(a);
    const double gb = gamma(b);
    const double s = ga + gb;
    return s > 0.0 ? ga / s : 0.5;
}

} // namespace oprisk
