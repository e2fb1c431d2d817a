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
#include <sstream>
#include <string>

#include "estlab/error.hpp"
#include "estlab/matkernel.hpp"

namespace estlab {

enum class CovKind { Solvable, Exponential, White };

inline const char *to_string(CovKind k) {
    switch (k) {
    case CovKind::Solvable: return "solvable";
    case CovKind::Exponential: return "exponential";
    case CovKind::White: return "white";
    }
    return "?";
}

/// Declarative covariance model. `a` is the white-noise variance, `c` the
/// correlated-noise variance and `eta` the correlation time in units of the
/// measurement spacing (only read for CovKind::Exponential).
struct CovSpec {
    CovKind kind = CovKind::Solvable;
    double a = 1.0;
    double c = 0.0;
    double eta = 0.0;
    std::size_t n = 1;

    static CovSpec solvable(double a, double c, std::size_t n) { return {CovKind::Solvable, a, c, 0.0, n}; }
    static CovSpec exponential(double a, double c, double eta, std::size_t n) {
        return {CovKind::Exponential, a, c, eta, n};
    }
    static CovSpec white(double a, double c, std::size_t n) { return {CovKind::White, a, c, 0.0, n}; }

    void validate() const {
        if (n < 1) throw InvalidSpec("n must be >= 1");
        if (!std::isfinite(a) || !std::isfinite(c) || !std::isfinite(eta)) {
            throw InvalidSpec("parameters must be finite");
        }
        if (a < 0.0) throw InvalidSpec("a must be >= 0 (got " + num(a) + ")");
        switch (kind) {
        case CovKind::Solvable:
            if (c < -a / static_cast<double>(n)) {
                throw InvalidSpec("solvable model requires c >= -a/N (c = " + num(c) +
                                  ", -a/N = " + num(-a / static_cast<double>(n)) + ")");
            }
            break;
        case CovKind::Exponential:
            if (c < 0.0) throw InvalidSpec("exponential model requires c >= 0");
            if (eta < 0.0) throw InvalidSpec("exponential model requires eta >= 0");
            break;
        case CovKind::White:
            if (c < 0.0) throw InvalidSpec("white model requires c >= 0");
            break;
        }
    }

    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << "model=" << to_string(kind) << ";a=" << a << ";c=" << c;
        if (kind == CovKind::Exponential) os << ";eta=" << eta;
        os << ";n=" << n;
        return os.str();
    }
};

/// Dense covariance matrix of the model. Exponential with eta == 0 is the
/// white limit (a + c on the diagonal, zero elsewhere).
inline SymMatrix build(const CovSpec &spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.n);
    Matrix m(n, n);
    switch (spec.kind) {
    case CovKind::Solvable:
        m.setConstant(spec.c);
        m.diagonal().array() += spec.a;
        break;
    case CovKind::White:
        m.setZero();
        m.diagonal().setConstant(spec.a + spec.c);
        break;
    case CovKind::Exponential:
        if (spec.eta == 0.0) {
            m.setZero();
            m.diagonal().setConstant(spec.a + spec.c);
            break;
        }
        {
            // Entries depend on |i - j| only; tabulate once.
            Vector lag(n);
            for (Eigen::Index k = 0; k < n; ++k) lag[k] = spec.c * std::exp(-static_cast<double>(k) / spec.eta);
            for (Eigen::Index j = 0; j < n; ++j) {
                for (Eigen::Index i = 0; i < n; ++i) m(i, j) = lag[i > j ? i - j : j - i];
            }
            m.diagonal().array() += spec.a;
        }
        break;
    }
    return SymMatrix(std::move(m));
}

/// Eigenvalues σ²_k with weights w_k = (Σ_i O_ik)² / N.
struct WeightSpectrum {
    Vector sigmasq;
    Vector weights;

    void validate() const {
        if (sigmasq.size() == 0 || sigmasq.size() != weights.size()) {
            throw InvalidSpectrum("sigmasq and weights must be non-empty and of equal length");
        }
        if ((sigmasq.array() <= 0.0).any()) throw InvalidSpectrum("all eigenvalues must be > 0");
        if ((weights.array() < 0.0).any()) throw InvalidSpectrum("weights must be non-negative");
        if (std::abs(weights.sum() - 1.0) > 1e-10) {
            throw InvalidSpectrum("weights must sum to 1 (sum = " + num(weights.sum()) + ")");
        }
    }
};

/// Closed-form spectrum of a·δ_ij + c: (Nc + a, a, ..., a) with all weight on
/// the uniform eigenvector.
inline WeightSpectrum solvable_spectrum(double a, double c, std::size_t n) {
    if (n < 1) throw InvalidSpec("n must be >= 1");
    if (!(a > 0.0)) throw InvalidSpec("a must be > 0");
    const double lead = static_cast<double>(n) * c + a;
    if (!(lead > 0.0)) {
        throw InvalidSpec("leading eigenvalue Nc + a = " + num(lead) + " must be > 0 (c > -a/N)");
    }
    const auto N = static_cast<Eigen::Index>(n);
    WeightSpectrum ws;
    ws.sigmasq = Vector::Constant(N, a);
    ws.sigmasq[0] = lead;
    ws.weights = Vector::Zero(N);
    ws.weights[0] = 1.0;
    return ws;
}

inline WeightSpectrum spectrum_from_matrix(const SymMatrix &c) {
    const EigenSystem es = eigendecompose(c);
    if (es.eigenvalues.size() == 0) throw InvalidSpectrum("empty matrix");
    const double lmax = es.eigenvalues[0];
    const double lmin = es.eigenvalues[es.eigenvalues.size() - 1];
    if (!(lmax > 0.0) || !(lmin > kPsdTolerance * lmax)) {
        throw NotPositiveDefinite("smallest eigenvalue " + num(lmin) + " vs largest " +
                                  num(lmax));
    }
    WeightSpectrum ws;
    ws.sigmasq = es.eigenvalues;
    const Vector column_sums = es.eigenvectors.colwise().sum().transpose();
    ws.weights = column_sums.cwiseAbs2() / static_cast<double>(c.dim());
    return ws;
}

/// Exact inverse of a·δ_ij + c: ((a + cN)δ_ij − c) / (a² + Nac).
inline SymMatrix solvable_inverse(double a, double c, std::size_t n) {
    if (n < 1) throw InvalidSpec("n must be >= 1");
    if (!(a > 0.0)) throw InvalidSpec("a must be > 0");
    const double N = static_cast<double>(n);
    if (!(c > -a / N)) throw InvalidSpec("solvable inverse requires c > -a/N");
    const double denom = a * a + N * a * c;
    const auto dim = static_cast<Eigen::Index>(n);
    Matrix m = Matrix::Constant(dim, dim, -c / denom);
    m.diagonal().array() += (a + c * N) / denom;
    return SymMatrix(std::move(m));
}

} // namespace estlab
