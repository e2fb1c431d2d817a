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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "estlab/error.hpp"
#include "estlab/matkernel.hpp"
#include "estlab/rng.hpp"

namespace estlab {

/// Two-outcome weak-value model parameterized by the overlap angle φ:
/// A_w = −cot(φ/2), A_w⊥ = tan(φ/2), γ = sin²(φ/2).
struct SpinModel {
    double phi;
    double aw;
    double awp;
    double gamma;
};

inline SpinModel spin_model(double phi) {
    if (!(phi > 0.0 && phi < std::numbers::pi)) {
        throw OutOfDomain("phi must lie in (0, pi), got " + num(phi));
    }
    const double half = 0.5 * phi;
    const double t = std::tan(half);
    const double s = std::sin(half);
    return {phi, -1.0 / t, t, s * s};
}

/// Angle whose post-selection probability is `gamma`.
inline double spin_phi_for_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidGamma("gamma must lie in (0, 1)");
    return 2.0 * std::asin(std::sqrt(gamma));
}

enum class Scheme { Direct, BernoulliPostselect, PeriodicPostselect, AlternatingSign, ContiguousBlocks };

inline const char *to_string(Scheme s) {
    switch (s) {
    case Scheme::Direct: return "direct";
    case Scheme::BernoulliPostselect: return "bernoulli";
    case Scheme::PeriodicPostselect: return "periodic";
    case Scheme::AlternatingSign: return "alternating";
    case Scheme::ContiguousBlocks: return "blocks";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view name) {
    for (Scheme s : {Scheme::Direct, Scheme::BernoulliPostselect, Scheme::PeriodicPostselect,
                     Scheme::AlternatingSign, Scheme::ContiguousBlocks}) {
        if (name == to_string(s)) return s;
    }
    throw ValidationError("unknown scheme '" + std::string(name) +
                          "' (expected bernoulli | periodic | alternating | blocks | direct)");
}

/// Channel labels. For post-selection and block designs `First` is the
/// retained outcome and `Second` the rejected one; for alternating designs
/// they are the plus and minus signal channels.
enum class Channel : std::uint8_t { First = 0, Second = 1 };

struct PartitionDesign {
    Scheme scheme = Scheme::Direct;
    std::vector<Channel> assignment;
    /// Mean-shift coefficient (weak value) of each channel.
    std::array<double, 2> coefficients{1.0, 1.0};
    /// Nominal post-selection probability; 1 for designs without selection.
    double gamma = 1.0;

    std::size_t n() const noexcept { return assignment.size(); }

    double coefficient(Channel ch) const { return coefficients[static_cast<std::size_t>(ch)]; }

    std::vector<std::size_t> slots(Channel ch) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            if (assignment[i] == ch) out.push_back(i);
        }
        return out;
    }

    std::size_t count(Channel ch) const {
        std::size_t k = 0;
        for (Channel c : assignment) k += (c == ch);
        return k;
    }

    /// ∂μ/∂d: the per-slot coefficient vector.
    Vector mu_prime() const {
        Vector out(static_cast<Eigen::Index>(n()));
        for (std::size_t i = 0; i < n(); ++i) out[static_cast<Eigen::Index>(i)] = coefficient(assignment[i]);
        return out;
    }

    /// mu_prime with every slot outside `ch` zeroed.
    Vector channel_mu_prime(Channel ch) const {
        Vector out = Vector::Zero(static_cast<Eigen::Index>(n()));
        for (std::size_t i = 0; i < n(); ++i) {
            if (assignment[i] == ch) out[static_cast<Eigen::Index>(i)] = coefficient(ch);
        }
        return out;
    }

    PartitionDesign with_coefficients(double first, double second) const {
        PartitionDesign d = *this;
        d.coefficients = {first, second};
        return d;
    }

    bool is_postselect() const noexcept {
        return scheme == Scheme::BernoulliPostselect || scheme == Scheme::PeriodicPostselect ||
               scheme == Scheme::ContiguousBlocks;
    }

    std::string describe() const {
        std::string s = std::string("scheme=") + to_string(scheme) + ";n=" + std::to_string(n());
        char buf[96];
        std::snprintf(buf, sizeof buf, ";gamma=%.17g;coef=%.17g,%.17g", gamma, coefficients[0], coefficients[1]);
        return s + buf;
    }
};

/// Single channel, unit coefficient: the plain direct measurement.
inline PartitionDesign direct_design(std::size_t n) {
    if (n < 1) throw InvalidSpec("n must be >= 1");
    PartitionDesign d;
    d.scheme = Scheme::Direct;
    d.assignment.assign(n, Channel::First);
    return d;
}

/// Builds the slot-to-channel assignment for `scheme`. Coefficients default
/// to 1 for both channels (+1/−1 for AlternatingSign); set them with
/// `with_coefficients`. `seed` and `stream` are only read by
/// BernoulliPostselect; distinct streams give independent retention patterns.
inline PartitionDesign make_design(std::size_t n, Scheme scheme, double gamma, std::uint64_t seed = 0,
                                   std::uint64_t stream = 0) {
    if (scheme == Scheme::Direct) return direct_design(n);
    if (n < 2) throw InvalidSpec("partition designs need n >= 2");
    PartitionDesign d;
    d.scheme = scheme;
    d.assignment.assign(n, Channel::Second);
    if (scheme != Scheme::AlternatingSign && !(gamma > 0.0 && gamma < 1.0)) {
        throw InvalidGamma("gamma must lie in (0, 1), got " + num(gamma));
    }
    switch (scheme) {
    case Scheme::BernoulliPostselect: {
        auto eng = substream(seed, StreamTag::Retention, stream);
        for (std::size_t i = 0; i < n; ++i) {
            if (uniform01(eng) < gamma) d.assignment[i] = Channel::First;
        }
        d.gamma = gamma;
        break;
    }
    case Scheme::PeriodicPostselect: {
        const auto period = static_cast<std::size_t>(std::llround(1.0 / gamma));
        for (std::size_t i = 0; i < n; i += period) d.assignment[i] = Channel::First;
        d.gamma = gamma;
        break;
    }
    case Scheme::AlternatingSign:
        for (std::size_t i = 0; i < n; i += 2) d.assignment[i] = Channel::First;
        d.coefficients = {1.0, -1.0};
        d.gamma = 1.0;
        break;
    case Scheme::ContiguousBlocks: {
        // Both blocks keep at least one slot.
        auto m = static_cast<std::size_t>(std::llround(gamma * static_cast<double>(n)));
        m = std::clamp<std::size_t>(m, 1, n - 1);
        for (std::size_t i = 0; i < m; ++i) d.assignment[i] = Channel::First;
        d.gamma = gamma;
        break;
    }
    case Scheme::Direct: break;
    }
    return d;
}

/// C′_kl = C_{i_k, i_l} for strictly increasing in-range indices.
inline SymMatrix submatrix(const SymMatrix &c, std::span<const std::size_t> retained) {
    for (std::size_t k = 0; k < retained.size(); ++k) {
        if (retained[k] >= c.dim()) {
            throw IndexOutOfRange("index " + std::to_string(retained[k]) + " >= dim " + std::to_string(c.dim()));
        }
        if (k > 0 && retained[k] <= retained[k - 1]) {
            throw IndexOutOfRange("retained indices must be strictly increasing");
        }
    }
    const auto m = static_cast<Eigen::Index>(retained.size());
    Matrix out(m, m);
    for (Eigen::Index l = 0; l < m; ++l) {
        for (Eigen::Index k = 0; k < m; ++k) out(k, l) = c(retained[k], retained[l]);
    }
    return SymMatrix(std::move(out));
}

/// Expected samples for true value d: slot i carries coefficient(channel(i))·d.
inline Vector mean_vector(const PartitionDesign &design, double d) { return design.mu_prime() * d; }

} // namespace estlab
