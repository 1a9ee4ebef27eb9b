#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>

namespace damcmc {

// Counter-based generator (Philox-4x32, 10 rounds).
//
// Every draw is a pure function of (seed, stream, counter), so independent
// streams are obtained by changing the stream id, never by burning draws, and
// a checkpoint only has to record the three integers below.  Stream
// assignment used by the toolkit:
//   stream 0        synthetic data generation
//   stream 1        prior-sample error-model build
//   stream 2 + k    chain k
// Gaussian draws use Box-Muller on two fresh uniforms (no cached spare), so
// the generator state never holds hidden distribution state.
class Rng {
public:
    Rng() : Rng(0, 0) {}
    Rng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream), block_(0), phase_(0) {}

    // Independent stream with the same seed; counter restarts at zero.
    Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform();

    // Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal();

    // Uniform integer in {0, ..., n-1} by rejection (exact, unbiased).
    std::uint64_t uniform_below(std::uint64_t n);

    // State serialization: "seed stream block phase" as decimal integers.
    void save(std::ostream& os) const;
    static Rng load(std::istream& is);

    bool operator==(const Rng& o) const {
        return seed_ == o.seed_ && stream_ == o.stream_ && block_ == o.block_ &&
               phase_ == o.phase_;
    }

    // Raw Philox-4x32-10 block function, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox4x32(
        const std::array<std::uint32_t, 4>& counter,
        const std::array<std::uint32_t, 2>& key);

private:
    std::uint64_t seed_;    // key
    std::uint64_t stream_;  // counter words 2..3
    std::uint64_t block_;   // counter words 0..1
    int phase_;             // which 64-bit half of the current block is next

    std::array<std::uint32_t, 4> cached_block_{};
    bool cache_valid_ = false;
    std::uint64_t cached_for_ = 0;
};

}  // namespace damcmc
