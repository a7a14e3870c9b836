// SPDX-License-Identifier: Apache-2.0
//
// chantool - millimeter-wave channel modeling toolkit
// Copyright (C) 2026 chantool contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "chantool/core.hpp"

// Deterministic random streams.
//
// The generator is SplitMix64 used in counter mode: output i of a stream with key K
// is mix64(K + (i + 1) * golden_gamma). A stream is fully described by (key, counter),
// so results depend only on the seed and the call sequence, never on the platform or
// on the standard library. Substreams get their key by hashing (parent key, label,
// index) through FNV-1a and the same finalizer.
//
// All distributions are implemented here instead of using <random> distributions,
// whose algorithms differ between standard library vendors.

namespace chantool
{

namespace detail
{
inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}
} // namespace detail

class RandomStream
{
public:
    explicit RandomStream(std::uint64_t key = 0) : key_(detail::mix64(key ^ 0x6A09E667F3BCC909ULL)) {}

    // Key of this stream; identical keys produce identical sequences
    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64()
    {
        ++counter_;
        return detail::mix64(key_ + counter_ * detail::golden_gamma);
    }

    // Uniform in [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform in (0, 1]
    double uniform_open_low() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consumes exactly two draws
    double normal()
    {
        const double u1 = uniform_open_low();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    double exponential(double mean) { return -mean * std::log(uniform_open_low()); }

    // Poisson by multiplication of uniforms; large means are split into chunks of <= 30
    std::uint64_t poisson(double mean)
    {
        if (!(mean > 0.0))
            return 0;
        std::uint64_t total = 0;
        double remaining = mean;
        while (remaining > 0.0)
        {
            const double chunk = remaining > 30.0 ? 30.0 : remaining;
            remaining -= chunk;
            const double limit = std::exp(-chunk);
            double prod = uniform_open_low();
            while (prod > limit)
            {
                ++total;
                prod *= uniform_open_low();
            }
        }
        return total;
    }

    bool bernoulli(double p) { return uniform() < p; }

    RandomStream substream(std::string_view label, std::uint64_t index) const
    {
        RandomStream s;
        std::uint64_t k = detail::mix64(key_ ^ detail::fnv1a64(label));
        k = detail::mix64(k + (index + 1) * detail::golden_gamma);
        s.key_ = k;
        return s;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stream for (seed, label, index); distinct labels or indices give unrelated keys
inline RandomStream derive_substream(std::int64_t seed, std::string_view label, std::int64_t index)
{
    return RandomStream(static_cast<std::uint64_t>(seed)).substream(label, static_cast<std::uint64_t>(index));
}

} // namespace chantool
