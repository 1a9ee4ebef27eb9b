#include "damcmc/rng.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace damcmc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Rng::philox4x32(
    const std::array<std::uint32_t, 4>& counter,
    const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return c;
}

std::uint64_t Rng::next_u64() {
    if (!cache_valid_ || cached_for_ != block_) {
        std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block_),
            static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_),
            static_cast<std::uint32_t>(stream_ >> 32)};
        std::array<std::uint32_t, 2> key = {
            static_cast<std::uint32_t>(seed_),
            static_cast<std::uint32_t>(seed_ >> 32)};
        cached_block_ = philox4x32(ctr, key);
        cached_for_ = block_;
        cache_valid_ = true;
    }
    std::uint64_t out;
    if (phase_ == 0) {
        out = static_cast<std::uint64_t>(cached_block_[0]) |
              (static_cast<std::uint64_t>(cached_block_[1]) << 32);
        phase_ = 1;
    } else {
        out = static_cast<std::uint64_t>(cached_block_[2]) |
              (static_cast<std::uint64_t>(cached_block_[3]) << 32);
        phase_ = 0;
        ++block_;
    }
    return out;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // 1-u is in (0, 1], keeping the log argument strictly positive.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
    // Rejection from the top of the 64-bit range removes modulo bias.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

void Rng::save(std::ostream& os) const {
    // Newline-terminated so the record stays self-delimiting when embedded
    // in a larger state stream.
    os << seed_ << ' ' << stream_ << ' ' << block_ << ' ' << phase_ << '\n';
}

Rng Rng::load(std::istream& is) {
    Rng r;
    is >> r.seed_ >> r.stream_ >> r.block_ >> r.phase_;
    return r;
}

}  // namespace damcmc
