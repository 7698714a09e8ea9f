#pragma once

#include <cstdint>

namespace oprisk {

/*!
 * Deterministic 64-bit random stream (xoshiro256++ core, splitmix64 seeding).
 *
 * A stream is fully determined by (master_seed, stream_id); distinct ids give
 * practically independent streams, so parallel workers can each own one and
 * results stay schedule-independent. Streams are single-owner: never share a
 * live RngStream across threads.
 *
 * All variate generators are hand-rolled on top of next_u64() so sequences
 * are identical across platforms and standard-library versions.
 */
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform on (0, 1].
    double uniform01_open_low();

    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate);

    /// Standard normal via Box-Muller (second deviate cached).
    double normal01();

    /// Gamma(shape, 1) via Marsaglia-Tsang squeeze.
    double gamma(double shape);

    /// Beta(a, b); a == +inf yields the degenerate value 1.
    double beta(double a, double b);

  private:
    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace oprisk
