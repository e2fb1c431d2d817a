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

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "estlab/error.hpp"

namespace estlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative pivot/eigenvalue threshold below which a covariance matrix is
/// treated as singular. No jitter is ever added.
inline constexpr double kPsdTolerance = 1e-10;

/// Dense symmetric matrix. Stores both triangles; construction enforces
/// symmetry and the object is immutable afterwards.
class SymMatrix {
public:
    SymMatrix() = default;

    /// Takes ownership of `m`. Rejects non-square input and asymmetry beyond
    /// 1e-12 relative to the largest entry; the stored value is (m + mᵀ)/2.
    explicit SymMatrix(Matrix m) : data_(std::move(m)) {
        if (data_.rows() != data_.cols()) {
            throw DimensionMismatch("matrix is " + std::to_string(data_.rows()) + "x" +
                                    std::to_string(data_.cols()) + ", expected square");
        }
        if (data_.size() == 0) return;
        const double scale = std::max(data_.cwiseAbs().maxCoeff(), 1e-300);
        const double asym = (data_ - data_.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-12 * scale) {
            throw ValidationError("matrix is not symmetric (max |C - Cᵀ| = " + num(asym) + ")");
        }
        Matrix sym = 0.5 * (data_ + data_.transpose());
        data_ = std::move(sym);
    }

    static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::Identity(n, n)); }

    static SymMatrix diagonal(const Vector &d) { return SymMatrix(Matrix(d.asDiagonal())); }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(data_.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Matrix &dense() const noexcept { return data_; }

    /// Σ_ij C_ij.
    double sum() const { return data_.sum(); }

private:
    Matrix data_;
};

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
struct EigenSystem {
    Vector eigenvalues;
    Matrix eigenvectors;
};

/// Cholesky factor C = L·Lᵀ, kept around so that several solves against the
/// same covariance reuse one factorization.
class SpdFactor {
public:
    explicit SpdFactor(const SymMatrix &c) : n_(c.dim()) {
        if (n_ == 0) return;
        llt_.compute(c.dense());
        const double max_diag = c.dense().diagonal().cwiseAbs().maxCoeff();
        if (llt_.info() != Eigen::Success) {
            throw NotPositiveDefinite("Cholesky factorization failed (non-positive pivot)");
        }
        const Vector pivots = llt_.matrixLLT().diagonal().cwiseAbs2();
        const double threshold = kPsdTolerance * max_diag;
        for (Eigen::Index i = 0; i < pivots.size(); ++i) {
            if (!(pivots[i] > threshold)) {
                throw NotPositiveDefinite("pivot " + std::to_string(i) + " = " + num(pivots[i]) +
                                          " is below tolerance " + num(threshold));
            }
        }
    }

    std::size_t dim() const noexcept { return n_; }

    Matrix lower() const {
        if (n_ == 0) return Matrix(0, 0);
        return llt_.matrixL();
    }

    /// L·z, the map that turns white noise into noise with covariance C.
    Vector color(const Vector &z) const {
        check_dim(static_cast<std::size_t>(z.size()));
        if (n_ == 0) return Vector(0);
        return llt_.matrixL() * z;
    }

    Vector solve(const Vector &b) const {
        check_dim(static_cast<std::size_t>(b.size()));
        if (n_ == 0) return Vector(0);
        return llt_.solve(b);
    }

    /// uᵀ·C⁻¹·v without forming C⁻¹.
    double quadratic_form(const Vector &u, const Vector &v) const {
        check_dim(static_cast<std::size_t>(u.size()));
        return u.dot(solve(v));
    }

    SymMatrix inverse() const {
        if (n_ == 0) return SymMatrix();
        const auto n = static_cast<Eigen::Index>(n_);
        return SymMatrix(llt_.solve(Matrix::Identity(n, n)));
    }

private:
    void check_dim(std::size_t got) const {
        if (got != n_) {
            throw DimensionMismatch("vector length " + std::to_string(got) + " vs matrix dim " + std::to_string(n_));
        }
    }

    std::size_t n_ = 0;
    Eigen::LLT<Matrix> llt_;
};

/// Lower-triangular L with L·Lᵀ = C.
inline Matrix factor_spd(const SymMatrix &c) { return SpdFactor(c).lower(); }

inline SymMatrix inverse(const SymMatrix &c) { return SpdFactor(c).inverse(); }

inline EigenSystem eigendecompose(const SymMatrix &c) {
    if (c.dim() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Matrix> solver(c.dense());
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("symmetric eigensolver did not converge");
    }
    // Eigen returns ascending order.
    EigenSystem out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

inline double quadratic_form(const SymMatrix &c, const Vector &u, const Vector &v) {
    if (u.size() != v.size()) {
        throw DimensionMismatch("u has length " + std::to_string(u.size()) + ", v has length " +
                                std::to_string(v.size()));
    }
    return SpdFactor(c).quadratic_form(u, v);
}

inline Vector ones(std::size_t n) { return Vector::Ones(static_cast<Eigen::Index>(n)); }

/// ‖A − B‖_F / ‖B‖_F, with an absolute fallback when B is zero.
inline double relative_frobenius(const Matrix &a, const Matrix &b) {
    const double denom = b.norm();
    const double diff = (a - b).norm();
    return denom > 0.0 ? diff / denom : diff;
}

} // namespace estlab
