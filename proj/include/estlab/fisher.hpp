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

#include "estlab/covmodel.hpp"
#include "estlab/error.hpp"
#include "estlab/matkernel.hpp"
#include "estlab/partition.hpp"

namespace estlab {

enum class FisherMethod { ClosedForm, NumericInverse, EigenWeighted };

inline const char *to_string(FisherMethod m) {
    switch (m) {
    case FisherMethod::ClosedForm: return "closed_form";
    case FisherMethod::NumericInverse: return "numeric_inverse";
    case FisherMethod::EigenWeighted: return "eigen_weighted";
    }
    return "?";
}

/// Block decomposition of a two-channel Fisher information: I1 from the
/// first channel, I2 from the second, I3 from the cross blocks.
struct FisherTerms {
    double i1 = 0.0;
    double i2 = 0.0;
    double i3 = 0.0;
    double sum() const { return i1 + i2 + i3; }
};

struct FisherReport {
    double value = 0.0;
    FisherMethod method = FisherMethod::NumericInverse;
    std::optional<FisherTerms> terms;
    std::optional<double> equal_weight_variance;
};

// ---------------------------------------------------------------------------
// Direct measurement

/// ⟨A⟩²·Σ_ij [C⁻¹]_ij via one solve against the ones vector.
inline FisherReport fi_direct_numeric(const SymMatrix &c, double mean_a = 1.0) {
    if (mean_a == 0.0) throw ValidationError("meanA must be non-zero");
    const Vector u = ones(c.dim());
    FisherReport r;
    r.value = mean_a * mean_a * SpdFactor(c).quadratic_form(u, u);
    r.method = FisherMethod::NumericInverse;
    const double n = static_cast<double>(c.dim());
    r.equal_weight_variance = c.sum() / (n * n * mean_a * mean_a);
    return r;
}

/// ⟨A⟩²·N·Σ_k w_k / σ²_k.
inline FisherReport fi_eigen(const WeightSpectrum &ws, std::size_t n, double mean_a = 1.0) {
    ws.validate();
    if (static_cast<std::size_t>(ws.sigmasq.size()) != n) {
        throw InvalidSpectrum("spectrum length " + std::to_string(ws.sigmasq.size()) + " != n " + std::to_string(n));
    }
    FisherReport r;
    const double N = static_cast<double>(n);
    r.value = mean_a * mean_a * N * ws.weights.cwiseQuotient(ws.sigmasq).sum();
    r.method = FisherMethod::EigenWeighted;
    r.equal_weight_variance = ws.weights.dot(ws.sigmasq) / N / (mean_a * mean_a);
    return r;
}

/// Closed form for a·δ_ij + c: ⟨A⟩²·N/(a + Nc). The equal-weight mean
/// saturates it, so its variance is the reciprocal.
inline FisherReport fi_direct_solvable(double a, double c, std::size_t n, double mean_a = 1.0) {
    CovSpec::solvable(a, c, n).validate();
    const double N = static_cast<double>(n);
    const double denom = a + N * c;
    if (!(denom > 0.0)) throw InvalidSpec("a + Nc must be > 0");
    FisherReport r;
    r.value = mean_a * mean_a * N / denom;
    r.method = FisherMethod::ClosedForm;
    r.equal_weight_variance = (a / N + c) / (mean_a * mean_a);
    return r;
}

// ---------------------------------------------------------------------------
// Two-outcome example

struct TwoOutcomeSpec {
    double var1 = 1.0;
    double var2 = 1.0;
    double cov = 0.0;

    /// Builds from the asymmetry x = var1/var2 and correlation r with var2 = 1.
    static TwoOutcomeSpec from_xr(double x, double r) { return {x, 1.0, r * std::sqrt(x)}; }

    double x() const { return var1 / var2; }
    double r() const { return cov / std::sqrt(var1 * var2); }

    void validate() const {
        if (!(var1 > 0.0) || !(var2 > 0.0)) throw InvalidSpec("variances must be > 0");
        if (cov * cov > var1 * var2 * (1.0 + 1e-12)) throw InvalidSpec("|cov| exceeds sqrt(var1*var2)");
    }
};

/// α²·var1 + (1−α)²·var2 + 2α(1−α)·cov for the estimator α·s1 + (1−α)·s2.
inline double two_outcome_variance(const TwoOutcomeSpec &s, double alpha) {
    const double beta = 1.0 - alpha;
    return alpha * alpha * s.var1 + beta * beta * s.var2 + 2.0 * alpha * beta * s.cov;
}

/// (var1 + var2 − 2cov)/(var1·var2 − cov²). Throws when |r| = 1.
inline double fi_two_outcome(const TwoOutcomeSpec &s) {
    s.validate();
    const double det = s.var1 * s.var2 - s.cov * s.cov;
    if (!(det > 1e-14 * s.var1 * s.var2)) {
        throw SingularCovariance("cov^2 = var1*var2: the outcomes are perfectly (anti)correlated");
    }
    return (s.var1 + s.var2 - 2.0 * s.cov) / det;
}

/// Weight α* = (var2 − cov)/(var1 + var2 − 2cov) minimizing the variance.
inline double optimal_alpha(const TwoOutcomeSpec &s) {
    s.validate();
    const double denom = s.var1 + s.var2 - 2.0 * s.cov;
    if (!(denom > 1e-14 * (s.var1 + s.var2))) {
        throw DegenerateDenominator("var1 + var2 - 2cov = 0: every weighting has the same variance");
    }
    return (s.var2 - s.cov) / denom;
}

/// Minimum variance over α. Unlike 1/fi_two_outcome this stays finite (zero)
/// at |r| = 1, and falls back to the common value when every α is optimal.
inline double min_two_outcome_variance(const TwoOutcomeSpec &s) {
    s.validate();
    const double denom = s.var1 + s.var2 - 2.0 * s.cov;
    if (!(denom > 1e-14 * (s.var1 + s.var2))) return two_outcome_variance(s, 0.5);
    return std::max(0.0, (s.var1 * s.var2 - s.cov * s.cov) / denom);
}

// ---------------------------------------------------------------------------
// Partitioned (multi-channel) measurements

/// mu_primeᵀ·C⁻¹·mu_prime. When `design` is given the value is also split
/// into per-block terms using the block form of the full inverse.
inline FisherReport fi_partitioned(const SymMatrix &c, const Vector &mu_prime,
                                   const PartitionDesign *design = nullptr) {
    if (static_cast<std::size_t>(mu_prime.size()) != c.dim()) {
        throw DimensionMismatch("mu_prime length " + std::to_string(mu_prime.size()) + " vs dim " +
                                std::to_string(c.dim()));
    }
    const SpdFactor f(c);
    FisherReport r;
    r.method = FisherMethod::NumericInverse;
    const Vector w = f.solve(mu_prime);
    r.value = mu_prime.dot(w);
    if (design != nullptr) {
        if (design->n() != c.dim()) throw DimensionMismatch("design size does not match covariance");
        Vector u1 = Vector::Zero(mu_prime.size());
        Vector u2 = Vector::Zero(mu_prime.size());
        for (std::size_t i = 0; i < design->n(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            (design->assignment[i] == Channel::First ? u1 : u2)[k] = mu_prime[k];
        }
        const Vector w1 = f.solve(u1);
        const Vector w2 = f.solve(u2);
        FisherTerms t;
        t.i1 = u1.dot(w1);
        t.i2 = u2.dot(w2);
        t.i3 = u1.dot(w2) + u2.dot(w1);
        r.terms = t;
    }
    const double norm2 = mu_prime.squaredNorm();
    if (norm2 > 0.0) r.equal_weight_variance = mu_prime.dot(c.dense() * mu_prime) / (norm2 * norm2);
    return r;
}

inline FisherReport fi_partitioned(const SymMatrix &c, const PartitionDesign &design) {
    return fi_partitioned(c, design.mu_prime(), &design);
}

/// Weak-value amplification: only the First channel is kept, so the
/// information is A_w²·Σ[C′⁻¹] over the retained submatrix.
inline FisherReport fi_wva_numeric(const SymMatrix &c, const PartitionDesign &design) {
    if (design.n() != c.dim()) throw DimensionMismatch("design size does not match covariance");
    const auto kept = design.slots(Channel::First);
    if (kept.empty()) throw EmptyRetainedSet("no retained slots in design");
    const SymMatrix sub = submatrix(c, kept);
    const double aw = design.coefficient(Channel::First);
    const Vector u = ones(kept.size());
    FisherReport r;
    r.method = FisherMethod::NumericInverse;
    r.value = aw * aw * SpdFactor(sub).quadratic_form(u, u);
    const double m = static_cast<double>(kept.size());
    r.equal_weight_variance = sub.sum() / (m * m * aw * aw);
    return r;
}

/// A_w²·γN/(a + γNc) for the solvable model.
inline double fi_wva_solvable(double a, double c, std::size_t n, double gamma, double aw) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidSpec("gamma must lie in (0, 1]");
    CovSpec::solvable(a, c, n).validate();
    const double gn = gamma * static_cast<double>(n);
    const double denom = a + gn * c;
    if (!(denom > 0.0)) throw InvalidSpec("a + gamma*N*c must be > 0");
    return aw * aw * gn / denom;
}

/// Two-channel information for the solvable model with γN slots carrying
/// A_w and (1−γ)N carrying A_w⊥, including the block terms.
inline FisherReport fi_opm_solvable(double a, double c, std::size_t n, double gamma, double aw, double awp) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidSpec("gamma must lie in (0, 1)");
    if (!(a > 0.0)) throw InvalidSpec("a must be > 0");
    CovSpec::solvable(a, c, n).validate();
    const double N = static_cast<double>(n);
    const double denom = a * a + N * a * c;
    if (!(denom > 0.0)) throw InvalidSpec("a^2 + Nac must be > 0");
    const double n1 = gamma * N;
    const double n2 = (1.0 - gamma) * N;
    // Block sums of the exact inverse ((a + cN)δ_ij − c)/(a² + Nac).
    const double s11 = (n1 * (a + c * N) - c * n1 * n1) / denom;
    const double s22 = (n2 * (a + c * N) - c * n2 * n2) / denom;
    const double s12 = -c * n1 * n2 / denom;
    FisherReport r;
    r.method = FisherMethod::ClosedForm;
    r.terms = FisherTerms{aw * aw * s11, awp * awp * s22, 2.0 * aw * awp * s12};
    const double diff = aw - awp;
    r.value = (a * N * (gamma * aw * aw + (1.0 - gamma) * awp * awp) +
               c * gamma * (1.0 - gamma) * N * N * diff * diff) /
              denom;
    return r;
}

/// Variance of the linear unbiased estimator Σ μ′_i s_i / Σ μ′_i², i.e.
/// μ′ᵀCμ′/(μ′ᵀμ′)². Without mu_prime this is the plain mean, (1/N²)Σ C_ij.
inline double equal_weight_variance(const SymMatrix &c, const std::optional<Vector> &mu_prime = std::nullopt) {
    if (c.dim() == 0) throw DimensionMismatch("empty covariance");
    if (!mu_prime) {
        const double n = static_cast<double>(c.dim());
        return c.sum() / (n * n);
    }
    if (static_cast<std::size_t>(mu_prime->size()) != c.dim()) {
        throw DimensionMismatch("mu_prime length does not match covariance");
    }
    const double norm2 = mu_prime->squaredNorm();
    if (!(norm2 > 0.0)) throw ValidationError("mu_prime must be non-zero");
    return mu_prime->dot(c.dense() * *mu_prime) / (norm2 * norm2);
}

} // namespace estlab
