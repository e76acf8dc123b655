// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace skipfree {

/// SplitMix64 output function applied to a keyed counter: the k-th draw of a
/// stream is mix(key + k * gamma). Streams keyed by (seed, index) are
/// independent of evaluation order, so parallel replications stay reproducible.
class SplitMixStream {
public:
    SplitMixStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : state_(mix(seed ^ mix(stream + kGamma))) {}

    std::uint64_t next() noexcept {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Exponential with the given rate.
    double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    std::uint64_t state_;
};

} // namespace skipfree
