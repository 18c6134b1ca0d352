// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random source. Every draw is a pure function of (key, counter),
// so independent Monte-Carlo trials get disjoint streams by deriving distinct
// keys from the master seed and the trial coordinates:
//
//   key = derive_stream_key(master_seed, {cell_index, trial_index, purpose})
//
// The mixing function is the SplitMix64 finalizer; with a fixed key the output
// sequence is SplitMix64 started at that key.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace fdisac {

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Injective in the ordered coordinate list for a fixed seed (up to 64-bit
/// hash collisions, which the harness checks for over its own lattice).
inline constexpr std::uint64_t derive_stream_key(std::uint64_t seed,
                                                 std::initializer_list<std::uint64_t> coords) {
    std::uint64_t k = mix64(seed + kGoldenGamma);
    for (std::uint64_t c : coords) k = mix64(k ^ mix64(c + 0x632be59bd9b4e019ULL));
    return k;
}

class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key = 0) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix64(key_ + (++counter_) * kGoldenGamma); }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

    /// Child stream; does not advance this generator.
    CounterRng split(std::uint64_t stream) const noexcept {
        return CounterRng(derive_stream_key(key_, {stream}));
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance = 1.0) {
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
        const double re = nd(*this);
        const double im = nd(*this);
        return {re, im};
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(*this); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace fdisac
