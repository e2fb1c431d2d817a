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
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "estlab/covmodel.hpp"
#include "estlab/error.hpp"
#include "estlab/matkernel.hpp"
#include "estlab/partition.hpp"

namespace estlab {

/// Sampled outcomes together with the design that produced them.
struct Dataset {
    Vector samples;
    PartitionDesign design;
    std::optional<double> truth;

    void validate() const {
        if (static_cast<std::size_t>(samples.size()) != design.n()) {
            throw DimensionMismatch("dataset has " + std::to_string(samples.size()) + " samples, design has " +
                                    std::to_string(design.n()) + " slots");
        }
    }
};

enum class EstimatorKind { EqualWeight, MaxLikelihood, WeakValue, BackgroundSubtraction, WeakValueCorrected };

inline const char *to_string(EstimatorKind k) {
    switch (k) {
    case EstimatorKind::EqualWeight: return "equal";
    case EstimatorKind::MaxLikelihood: return "ml";
    case EstimatorKind::WeakValue: return "wva";
    case EstimatorKind::BackgroundSubtraction: return "bgsub";
    case EstimatorKind::WeakValueCorrected: return "wva-corrected";
    }
    return "?";
}

inline EstimatorKind parse_estimator(std::string_view name) {
    for (EstimatorKind k : {EstimatorKind::EqualWeight, EstimatorKind::MaxLikelihood, EstimatorKind::WeakValue,
                            EstimatorKind::BackgroundSubtraction, EstimatorKind::WeakValueCorrected}) {
        if (name == to_string(k)) return k;
    }
    throw ValidationError("unknown estimator '" + std::string(name) +
                          "' (expected equal | ml | wva | bgsub | wva-corrected)");
}

/// Normalization of the weak-value estimator. `Unbiased` divides the
/// retained sum by A_w·m (m = realized retained count); `Literal` uses the
/// prefactor A_w/N, which agrees with it only when A_w²·γ ≈ 1.
enum class WvaNormalization { Unbiased, Literal };

/// Every estimator here is linear in the samples: d̂ = gᵀs. Computing g once
/// per (design, covariance) lets trial loops reduce to a dot product.
struct LinearEstimator {
    EstimatorKind kind = EstimatorKind::EqualWeight;
    Vector weights;

    double apply(const Vector &samples) const {
        if (samples.size() != weights.size()) {
            throw DimensionMismatch("sample length " + std::to_string(samples.size()) + " vs estimator length " +
                                    std::to_string(weights.size()));
        }
        return weights.dot(samples);
    }

    /// Slots with non-zero weight; samples elsewhere never affect d̂.
    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (Eigen::Index i = 0; i < weights.size(); ++i) {
            if (weights[i] != 0.0) out.push_back(static_cast<std::size_t>(i));
        }
        return out;
    }
};

namespace detail {

inline void require_single_channel(const PartitionDesign &d) {
    if (d.count(Channel::Second) != 0 || d.coefficient(Channel::First) != 1.0) {
        throw WrongDesign("equal-weight mean needs a single-channel design with unit coefficient");
    }
}

inline void require_postselect(const PartitionDesign &d) {
    if (!d.is_postselect()) {
        throw WrongDesign(std::string("weak-value estimators need a post-selection design, got ") +
                          to_string(d.scheme));
    }
    if (d.coefficient(Channel::First) == 0.0) throw WrongDesign("weak value A_w must be non-zero");
}

inline Vector wva_weights(const PartitionDesign &d, WvaNormalization norm) {
    require_postselect(d);
    const std::size_t m = d.count(Channel::First);
    if (m == 0) throw EmptyRetainedSet("no retained slots in design");
    const double aw = d.coefficient(Channel::First);
    const double w = norm == WvaNormalization::Unbiased ? 1.0 / (aw * static_cast<double>(m))
                                                        : aw / static_cast<double>(d.n());
    Vector g = Vector::Zero(static_cast<Eigen::Index>(d.n()));
    for (std::size_t i : d.slots(Channel::First)) g[static_cast<Eigen::Index>(i)] = w;
    return g;
}

} // namespace detail

inline LinearEstimator equal_weight_estimator(const PartitionDesign &d) {
    detail::require_single_channel(d);
    const double n = static_cast<double>(d.n());
    return {EstimatorKind::EqualWeight, Vector::Constant(static_cast<Eigen::Index>(d.n()), 1.0 / n)};
}

/// g = C⁻¹μ′ / (μ′ᵀC⁻¹μ′). The denominator is the Fisher information.
inline LinearEstimator ml_estimator(const PartitionDesign &d, const SymMatrix &c) {
    if (c.dim() != d.n()) throw DimensionMismatch("design size does not match covariance");
    const Vector mu = d.mu_prime();
    const Vector w = SpdFactor(c).solve(mu);
    const double info = mu.dot(w);
    if (!(info > 0.0)) throw ValidationError("mean-shift vector carries no information");
    return {EstimatorKind::MaxLikelihood, w / info};
}

inline LinearEstimator wva_estimator(const PartitionDesign &d, WvaNormalization norm = WvaNormalization::Unbiased) {
    return {EstimatorKind::WeakValue, detail::wva_weights(d, norm)};
}

/// Σ μ′_i s_i / Σ μ′_i² for a two-channel design with coefficients ±1; in
/// the balanced case that is (Σ_plus s − Σ_minus s)/N.
inline LinearEstimator background_subtraction_estimator(const PartitionDesign &d) {
    const double c1 = d.coefficient(Channel::First);
    const double c2 = d.coefficient(Channel::Second);
    if (std::abs(c1) != 1.0 || c2 != -c1 || d.count(Channel::First) == 0 || d.count(Channel::Second) == 0) {
        throw WrongDesign("background subtraction needs two non-empty channels with coefficients +1 and -1");
    }
    const Vector mu = d.mu_prime();
    return {EstimatorKind::BackgroundSubtraction, mu / mu.squaredNorm()};
}

/// Weak-value estimator plus the correction −(A_w·c·γ/(a + Nc))·Σ_all s for
/// the solvable model; γ is the realized retained fraction.
inline LinearEstimator wva_corrected_estimator(const PartitionDesign &d, double a, double c,
                                               WvaNormalization norm = WvaNormalization::Unbiased) {
    CovSpec::solvable(a, c, d.n()).validate();
    Vector g = detail::wva_weights(d, norm);
    const double n = static_cast<double>(d.n());
    const double gamma = static_cast<double>(d.count(Channel::First)) / n;
    const double denom = a + n * c;
    if (!(denom > 0.0)) throw InvalidSpec("a + Nc must be > 0");
    g.array() -= d.coefficient(Channel::First) * c * gamma / denom;
    return {EstimatorKind::WeakValueCorrected, g};
}

/// Builds any estimator by kind. `c` is required for MaxLikelihood and
/// `solvable` for WeakValueCorrected.
inline LinearEstimator make_estimator(EstimatorKind kind, const PartitionDesign &d, const SymMatrix *c = nullptr,
                                      const CovSpec *solvable = nullptr,
                                      WvaNormalization norm = WvaNormalization::Unbiased) {
    switch (kind) {
    case EstimatorKind::EqualWeight: return equal_weight_estimator(d);
    case EstimatorKind::MaxLikelihood:
        if (c == nullptr) throw ValidationError("ml estimator needs the covariance matrix");
        return ml_estimator(d, *c);
    case EstimatorKind::WeakValue: return wva_estimator(d, norm);
    case EstimatorKind::BackgroundSubtraction: return background_subtraction_estimator(d);
    case EstimatorKind::WeakValueCorrected:
        if (solvable == nullptr || solvable->kind != CovKind::Solvable) {
            throw WrongDesign("wva-corrected is defined for the solvable model only");
        }
        return wva_corrected_estimator(d, solvable->a, solvable->c, norm);
    }
    throw ValidationError("unknown estimator");
}

// Dataset-level entry points.

inline double estimate_equal_weight(const Dataset &data) {
    data.validate();
    return equal_weight_estimator(data.design).apply(data.samples);
}

inline double estimate_ml(const Dataset &data, const SymMatrix &c) {
    data.validate();
    return ml_estimator(data.design, c).apply(data.samples);
}

inline double estimate_wva(const Dataset &data, WvaNormalization norm = WvaNormalization::Unbiased) {
    data.validate();
    return wva_estimator(data.design, norm).apply(data.samples);
}

inline double estimate_background_subtraction(const Dataset &data) {
    data.validate();
    return background_subtraction_estimator(data.design).apply(data.samples);
}

inline double estimate_wva_corrected(const Dataset &data, double a, double c,
                                     WvaNormalization norm = WvaNormalization::Unbiased) {
    data.validate();
    return wva_corrected_estimator(data.design, a, c, norm).apply(data.samples);
}

} // namespace estlab
