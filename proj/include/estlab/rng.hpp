// Copyright 2026 The estlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace estlab {

/// Name of the generator and normal-variate method, written into output
/// metadata; changing either breaks golden files.
inline constexpr const char *kRngDescription = "mt19937_64+seed_seq(seed,stream,index);normal=marsaglia-polar";

/// Domain tags keep the streams used by different consumers disjoint.
enum class StreamTag : std::uint32_t { Noise = 1, Retention = 2 };

/// Independent engine for (seed, tag, index). std::seed_seq and
/// std::mt19937_64 are fully specified by the standard, so the output is
/// identical across conforming library implementations.
inline std::mt19937_64 substream(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64 &eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

/// Standard normal variates by the Marsaglia polar method. Implemented here
/// rather than with std::normal_distribution, whose algorithm is unspecified.
class NormalSource {
public:
    explicit NormalSource(std::mt19937_64 eng) : eng_(std::move(eng)) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0, v = 0.0, s = 0.0;
        do {
            u = 2.0 * uniform01(eng_) - 1.0;
            v = 2.0 * uniform01(eng_) - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace estlab
