#pragma once

#include <cstdint>
#include <random>

namespace nbnn {

// Stream seed for (master seed, stream id): one splitmix64-style mix of the
// master seed advanced by (id + 1) golden-ratio increments. Every consumer of
// per-episode randomness derives its seed here, never from shared state, so
// episodes are reproducible independently of evaluation order.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_id);

// Deterministic random source. All draw primitives are written out against
// the raw mt19937_64 output stream (no std::*_distribution), so sequences
// are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform index in [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

    // Standard normal via Box-Muller, one cached spare.
    double normal();

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace nbnn
