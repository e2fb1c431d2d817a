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
#include <cstdint>
#include <string>
#include <vector>

#include "estlab/covmodel.hpp"
#include "estlab/csv.hpp"
#include "estlab/error.hpp"
#include "estlab/estimators.hpp"
#include "estlab/matkernel.hpp"
#include "estlab/parallel.hpp"
#include "estlab/partition.hpp"
#include "estlab/rng.hpp"

namespace estlab {

/// Correlated noise x = L·z for the trial-th substream of `seed`.
inline Vector sample_noise(const SpdFactor &factor, std::uint64_t seed, std::uint64_t trial = 0) {
    NormalSource normal(substream(seed, StreamTag::Noise, trial));
    Vector z(static_cast<Eigen::Index>(factor.dim()));
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal();
    return factor.color(z);
}

inline Vector sample_noise(const SymMatrix &c, std::uint64_t seed, std::uint64_t trial = 0) {
    return sample_noise(SpdFactor(c), seed, trial);
}

/// Sum in index order with Neumaier compensation.
inline double stable_sum(const std::vector<double> &xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

struct TrialEnsemble {
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    std::vector<double> estimates;
    double empirical_mean = 0.0;
    /// Unbiased (T − 1) normalization.
    double empirical_variance = 0.0;
    std::string config;

    std::string digest() const { return digest_hex(config); }

    /// Recomputes mean and variance from `estimates` (two-pass).
    void summarize() {
        trials = estimates.size();
        if (trials == 0) return;
        empirical_mean = stable_sum(estimates) / static_cast<double>(trials);
        std::vector<double> sq(estimates.size());
        for (std::size_t i = 0; i < estimates.size(); ++i) {
            const double d = estimates[i] - empirical_mean;
            sq[i] = d * d;
        }
        empirical_variance = trials > 1 ? stable_sum(sq) / static_cast<double>(trials - 1) : 0.0;
    }

    double standard_error() const { return std::sqrt(empirical_variance / static_cast<double>(trials)); }
};

struct TrialOptions {
    std::size_t threads = 1;
    WvaNormalization wva_norm = WvaNormalization::Unbiased;
};

/// Runs T trials of `estimator` on data mean_vector(design, d_true) + noise.
/// Only slots in the estimator's support are simulated, from the marginal
/// covariance of those slots; the estimates have exactly the distribution a
/// full simulation would give.
inline TrialEnsemble run_trials(const SymMatrix &c, const PartitionDesign &design, const LinearEstimator &estimator,
                                double d_true, std::size_t trials, std::uint64_t seed, std::size_t threads = 1,
                                std::string config = {}) {
    if (trials < 2) throw ValidationError("trials must be >= 2");
    if (c.dim() != design.n() || static_cast<std::size_t>(estimator.weights.size()) != design.n()) {
        throw DimensionMismatch("covariance, design and estimator sizes disagree");
    }
    const auto support = estimator.support();
    const SpdFactor factor(submatrix(c, support));
    const Vector mean_full = mean_vector(design, d_true);
    Vector mean(static_cast<Eigen::Index>(support.size()));
    Vector g(static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) {
        mean[static_cast<Eigen::Index>(k)] = mean_full[static_cast<Eigen::Index>(support[k])];
        g[static_cast<Eigen::Index>(k)] = estimator.weights[static_cast<Eigen::Index>(support[k])];
    }

    TrialEnsemble ens;
    ens.seed = seed;
    ens.estimates.assign(trials, 0.0);
    parallel_for(trials, threads, [&](std::size_t t) {
        const Vector s = mean + sample_noise(factor, seed, t);
        ens.estimates[t] = g.dot(s);
    });
    ens.summarize();
    ens.config = std::move(config);
    return ens;
}

inline TrialEnsemble run_trials(const CovSpec &spec, const PartitionDesign &design, EstimatorKind kind,
                                double d_true, std::size_t trials, std::uint64_t seed,
                                const TrialOptions &opts = {}) {
    spec.validate();
    if (spec.n != design.n()) throw DimensionMismatch("spec n does not match design size");
    const SymMatrix c = build(spec);
    const LinearEstimator est = make_estimator(kind, design, &c, &spec, opts.wva_norm);
    std::string config = spec.describe() + ";" + design.describe() + ";estimator=" + to_string(kind) +
                         ";d=" + format_double(d_true) + ";trials=" + std::to_string(trials) +
                         ";seed=" + std::to_string(seed) + ";rng=" + kRngDescription;
    if (opts.wva_norm == WvaNormalization::Literal) config += ";wva-norm=literal";
    return run_trials(c, design, est, d_true, trials, seed, opts.threads, std::move(config));
}

} // namespace estlab
